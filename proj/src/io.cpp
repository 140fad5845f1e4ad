#include "gshift/io.hpp"

#include <fstream>

#include "gshift/errors.hpp"

namespace gshift {

namespace {

std::vector<std::string> labels_of(const nlohmann::json& j) {
  if (!j.contains("labels")) return {};
  return j.at("labels").get<std::vector<std::string>>();
}

}  // namespace

GroupPtr group_from_json(const nlohmann::json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "free") return make_free_group(j.at("rank").get<std::size_t>(), labels_of(j));
    if (kind == "free_abelian")
      return make_free_abelian_group(j.at("rank").get<std::size_t>(), labels_of(j));
    if (kind == "bs" || kind == "baumslag_solitar") return make_baumslag_solitar(j.at("n").get<std::int64_t>());
    if (kind == "finite") {
      std::vector<std::size_t> gens;
      if (j.contains("generators")) gens = j.at("generators").get<std::vector<std::size_t>>();
      return make_finite_group(j.at("table").get<std::vector<std::vector<std::size_t>>>(), gens,
                               labels_of(j));
    }
    if (kind == "direct_product" || kind == "free_product") {
      std::vector<GroupPtr> fs;
      for (const auto& f : j.at("factors")) fs.push_back(group_from_json(f));
      return kind == "direct_product" ? make_direct_product(std::move(fs))
                                      : make_free_product(std::move(fs));
    }
    if (kind == "rewriting") {
      std::vector<std::pair<std::string, std::string>> rules;
      for (const auto& r : j.at("rules")) {
        if (!r.is_array() || r.size() != 2) throw MalformedInput("rewriting rule must be [lhs, rhs]");
        rules.emplace_back(r[0].get<std::string>(), r[1].get<std::string>());
      }
      std::size_t budget = j.value("budget", std::size_t(100000));
      return make_rewriting_group(j.at("generators").get<std::vector<std::string>>(), rules,
                                  budget);
    }
    if (kind == "generated") {
      GroupPtr base = group_from_json(j.at("base"));
      std::vector<Word> gens;
      for (const auto& w : j.at("generators")) gens.push_back(parse_word(*base, w.get<std::string>()));
      return make_generated_group(base, std::move(gens), labels_of(j));
    }
    throw MalformedInput("unknown group kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw MalformedInput(std::string("bad group description: ") + e.what());
  }
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MalformedInput("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw MalformedInput(path + ": " + e.what());
  }
}

}  // namespace gshift
