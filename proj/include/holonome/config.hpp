// Copyright 2026 The Holonome Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace holonome {

/** Input that violates a precondition (sizes, ranges, malformed literals). */
struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/** Request exceeds the configured dense-matrix or state-vector capacity. */
struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/** A group search found no element of the requested form. */
struct SearchFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/** A numerical routine failed to reach its accuracy target. */
struct AccuracyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/** Subspace overlap is singular; an open-path transport is undefined. */
struct OrthogonalSubspaceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/**
 * Size caps for dense work. Dense 2^n x 2^n matrices are far more expensive
 * than 2^n state vectors, so the two limits differ. Both can be raised via
 * the HOLONOME_DENSE_LIMIT environment variable (sets the matrix limit; the
 * state limit is max(matrix limit, 20)).
 */
struct Limits {
  int dense_matrix_qubits = 12;
  int state_vector_qubits = 20;
};

inline const Limits& limits() {
  static const Limits l = [] {
    Limits out;
    if (const char* env = std::getenv("HOLONOME_DENSE_LIMIT")) {
      int v = std::atoi(env);
      if (v > 0) {
        out.dense_matrix_qubits = v;
        if (v > out.state_vector_qubits) out.state_vector_qubits = v;
      }
    }
    return out;
  }();
  return l;
}

inline void check_dense_capacity(int n_qubits) {
  if (n_qubits > limits().dense_matrix_qubits) {
    throw CapacityError(
        "dense matrix on " + std::to_string(n_qubits) +
        " qubits exceeds the configured limit of " +
        std::to_string(limits().dense_matrix_qubits));
  }
}

inline void check_state_capacity(int n_qubits) {
  if (n_qubits > limits().state_vector_qubits) {
    throw CapacityError(
        "state vector on " + std::to_string(n_qubits) +
        " qubits exceeds the configured limit of " +
        std::to_string(limits().state_vector_qubits));
  }
}

}  // namespace holonome
