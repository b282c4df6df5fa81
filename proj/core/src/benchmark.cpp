/* SPDX-License-Identifier: Apache-2.0 */
#include "prrtail/benchmark.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace prrtail {

namespace fs = std::filesystem;

CanonicalPrr BenchmarkSpec::load() const { return to_canonical(parse_lrec_file(prr_path)); }

BenchmarkSpec load_benchmark(const std::string& json_path) {
  std::ifstream in(json_path);
  if (!in) throw std::runtime_error("cannot open " + json_path);
  nlohmann::json j = nlohmann::json::parse(in);
  BenchmarkSpec b;
  b.name = j.at("name").get<std::string>();
  fs::path prr = j.at("prr").get<std::string>();
  b.prr_path = prr.is_absolute() ? prr.string() : (fs::path(json_path).parent_path() / prr).string();
  b.kappa = j.at("kappa").get<std::string>();
  b.ep = j.at("ep").get<std::string>();
  if (j.contains("karp") && !j["karp"].is_null()) b.karp = j["karp"].get<std::string>();
  if (j.contains("comp") && !j["comp"].is_null()) b.comp = j["comp"].get<std::string>();
  const auto& t3 = j.at("table3");
  b.table3 = {t3.at("f").get<std::string>(), t3.at("t").get<std::string>(), t3.at("bound").get<std::string>()};
  b.table1_bound = j.value("table1_bound", b.table3.bound);
  return b;
}

std::vector<BenchmarkSpec> load_corpus(const std::string& dir) {
  std::vector<BenchmarkSpec> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".json") out.push_back(load_benchmark(e.path().string()));
  std::sort(out.begin(), out.end(), [](const BenchmarkSpec& a, const BenchmarkSpec& b) { return a.name < b.name; });
  return out;
}

}  // namespace prrtail
