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

#include <json.hpp>

#include "holonome/codes.hpp"

namespace holonome {

inline nlohmann::json code_to_json(const CodeSpec& code) {
  nlohmann::json j;
  j["n"] = code.n;
  j["k"] = code.k;
  j["r"] = code.r;
  auto lits = [](const std::vector<PauliOperator>& ps) {
    std::vector<std::string> out;
    for (const auto& p : ps) out.push_back(p.str());
    return out;
  };
  j["stabilizer_gens"] = lits(code.stabilizer_gens);
  j["gauge_gens"] = lits(code.gauge_gens);
  j["logical_x"] = lits(code.logical_x);
  j["logical_z"] = lits(code.logical_z);
  if (!code.layout.empty()) {
    nlohmann::json grid = nlohmann::json::array();
    for (auto [row, col] : code.layout) grid.push_back({row, col});
    j["layout"] = grid;
  }
  return j;
}

inline CodeSpec code_from_json(const nlohmann::json& j) {
  CodeSpec code;
  code.n = j.at("n").get<int>();
  code.k = j.at("k").get<int>();
  code.r = j.at("r").get<int>();
  auto parse_list = [](const nlohmann::json& arr) {
    std::vector<PauliOperator> out;
    for (const auto& s : arr) out.push_back(PauliOperator::parse(s));
    return out;
  };
  code.stabilizer_gens = parse_list(j.at("stabilizer_gens"));
  if (j.contains("gauge_gens")) code.gauge_gens = parse_list(j["gauge_gens"]);
  code.logical_x = parse_list(j.at("logical_x"));
  code.logical_z = parse_list(j.at("logical_z"));
  if (j.contains("layout"))
    for (const auto& rc : j["layout"])
      code.layout.push_back({rc.at(0).get<int>(), rc.at(1).get<int>()});
  code.validate();
  return code;
}

}  // namespace holonome
