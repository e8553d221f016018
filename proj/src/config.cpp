#include "roiml/config.hpp"

#include <glob.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "roiml/error.hpp"

namespace roiml::config {
namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

[[noreturn]] void fail(const std::string& message) { throw Error(ErrorCode::Config, "config", message); }

void check_keys(const Json& object, const std::string& where, std::initializer_list<std::string_view> allowed) {
  if (!object.is_object()) fail(where + " must be an object");
  for (const auto& [key, value] : object.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail("unknown key " + (where.empty() ? key : where + "." + key));
    }
  }
}

std::string join(const std::string& where, std::string_view key) {
  return where.empty() ? std::string(key) : where + "." + std::string(key);
}

double get_number(const Json& object, const std::string& key, const std::string& where, double fallback) {
  auto it = object.find(key);
  if (it == object.end()) return fallback;
  if (!it->is_number()) fail(join(where, key) + " must be a number");
  return it->get<double>();
}

std::uint64_t get_unsigned(const Json& value, const std::string& name) {
  if (value.is_number_unsigned()) return value.get<std::uint64_t>();
  if (value.is_number_integer() && value.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(value.get<std::int64_t>());
  // Seeds above 2^53 survive only as strings in some JSON producers.
  if (value.is_string()) {
    const auto& s = value.get_ref<const std::string&>();
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec == std::errc() && ptr == s.data() + s.size() && !s.empty()) return out;
  }
  fail(name + " must be a nonnegative integer");
}

std::size_t get_size(const Json& object, const std::string& key, const std::string& where, std::size_t fallback) {
  auto it = object.find(key);
  if (it == object.end()) return fallback;
  return static_cast<std::size_t>(get_unsigned(*it, join(where, key)));
}

std::string get_string(const Json& object, const std::string& key, const std::string& where, std::string fallback) {
  auto it = object.find(key);
  if (it == object.end()) return fallback;
  if (!it->is_string()) fail(join(where, key) + " must be a string");
  return it->get<std::string>();
}

bool get_bool(const Json& object, const std::string& key, const std::string& where, bool fallback) {
  auto it = object.find(key);
  if (it == object.end()) return fallback;
  if (!it->is_boolean()) fail(join(where, key) + " must be true or false");
  return it->get<bool>();
}

std::vector<std::size_t> get_size_list(const Json& object, const std::string& key, const std::string& where,
                                       std::vector<std::size_t> fallback) {
  auto it = object.find(key);
  if (it == object.end()) return fallback;
  if (!it->is_array() || it->empty()) fail(join(where, key) + " must be a nonempty array");
  std::vector<std::size_t> out;
  for (const auto& v : *it) out.push_back(static_cast<std::size_t>(get_unsigned(v, join(where, key))));
  return out;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return (path.is_absolute() ? path : base / path).lexically_normal();
}

classify::VectorizerConfig parse_vectorizer(const Json& parent, const std::string& where) {
  classify::VectorizerConfig v;
  auto it = parent.find("vectorizer");
  if (it == parent.end()) return v;
  const std::string here = join(where, "vectorizer");
  check_keys(*it, here, {"min_df", "max_vocabulary", "smooth_idf"});
  v.min_df = get_size(*it, "min_df", here, v.min_df);
  v.max_vocabulary = get_size(*it, "max_vocabulary", here, v.max_vocabulary);
  v.smooth_idf = get_bool(*it, "smooth_idf", here, v.smooth_idf);
  if (v.min_df == 0) fail(here + ".min_df must be >= 1");
  return v;
}

TechniqueConfig parse_technique(const Json& node, const std::string& where, const fs::path& base) {
  check_keys(node, where,
             {"label", "kind", "trees", "max_depth", "min_samples_leaf", "threads", "tuning", "grid", "vectorizer",
              "alpha", "predictions", "curve"});
  TechniqueConfig t;
  const std::string kind = get_string(node, "kind", where, "random_forest");
  if (kind == "random_forest") {
    t.kind = TechniqueKind::RandomForest;
    auto& f = t.forest;
    f.forest.trees = get_size(node, "trees", where, f.forest.trees);
    f.forest.max_depth = get_size(node, "max_depth", where, f.forest.max_depth);
    f.forest.min_samples_leaf = get_size(node, "min_samples_leaf", where, f.forest.min_samples_leaf);
    f.forest.threads = get_size(node, "threads", where, f.forest.threads);
    if (f.forest.trees == 0) fail(join(where, "trees") + " must be >= 1");
    if (f.forest.min_samples_leaf == 0) fail(join(where, "min_samples_leaf") + " must be >= 1");
    try {
      f.tuning = harness::tuning_mode_from_string(get_string(node, "tuning", where, "once"));
    } catch (const Error&) {
      fail(join(where, "tuning") + " must be none, once or every_fraction");
    }
    if (auto g = node.find("grid"); g != node.end()) {
      const std::string here = join(where, "grid");
      check_keys(*g, here, {"trees", "max_depths", "folds"});
      f.grid.trees = get_size_list(*g, "trees", here, f.grid.trees);
      f.grid.max_depths = get_size_list(*g, "max_depths", here, f.grid.max_depths);
      f.grid.folds = get_size(*g, "folds", here, f.grid.folds);
      if (f.grid.folds < 2) fail(here + ".folds must be >= 2");
    }
    f.vectorizer = parse_vectorizer(node, where);
  } else if (kind == "naive_bayes") {
    t.kind = TechniqueKind::NaiveBayes;
    t.naive_bayes.alpha = get_number(node, "alpha", where, 1.0);
    if (!(t.naive_bayes.alpha > 0.0)) fail(join(where, "alpha") + " must be > 0");
    t.naive_bayes.vectorizer = parse_vectorizer(node, where);
  } else if (kind == "external") {
    t.kind = TechniqueKind::External;
    const std::string pattern = get_string(node, "predictions", where, "");
    if (pattern.empty()) fail(join(where, "predictions") + " is required for external techniques");
    t.predictions_glob = resolve(base, pattern).string();
  } else if (kind == "curve") {
    t.kind = TechniqueKind::CurveFile;
    const std::string path = get_string(node, "curve", where, "");
    if (path.empty()) fail(join(where, "curve") + " is required for curve techniques");
    t.curve = resolve(base, path);
  } else {
    fail(join(where, "kind") + " must be random_forest, naive_bayes, external or curve");
  }
  t.label = get_string(node, "label", where, kind);
  if (t.label.empty()) fail(join(where, "label") + " must not be empty");
  for (char c : t.label) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) {
      fail(join(where, "label") + " may only hold letters, digits, '-', '_' and '.' (it names output files)");
    }
  }
  return t;
}

roi::CostParameters parse_parameters(const Json& node, const std::string& where, const roi::CostParameters& base) {
  roi::CostParameters p = base;
  if (auto profile = node.find("profile"); profile != node.end()) {
    if (!profile->is_string()) fail(join(where, "profile") + " must be a string");
    try {
      p = roi::preset(profile->get<std::string>());
    } catch (const Error& e) {
      fail(join(where, "profile") + ": " + e.message());
    }
  }
  if (auto params = node.find("parameters"); params != node.end()) {
    try {
      p = roi::from_json(params->dump(), p);
    } catch (const Error& e) {
      fail(join(where, "parameters") + ": " + e.message());
    }
  }
  try {
    roi::validate(p);
  } catch (const Error& e) {
    fail(join(where, "parameters") + ": " + e.message());
  }
  return p;
}

void check_fractions(const std::vector<double>& fractions, double test_fraction, const std::string& name) {
  if (fractions.empty()) fail(name + " must not be empty");
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    if (!(fractions[i] > 0.0) || fractions[i] > 1.0 - test_fraction + 1e-9) {
      fail(name + " values must lie in (0, 1 - test_fraction]");
    }
    if (i > 0 && !(fractions[i] > fractions[i - 1])) fail(name + " must be strictly increasing");
  }
}

}  // namespace

std::string_view to_string(TechniqueKind kind) {
  switch (kind) {
    case TechniqueKind::RandomForest: return "random_forest";
    case TechniqueKind::NaiveBayes: return "naive_bayes";
    case TechniqueKind::External: return "external";
    case TechniqueKind::CurveFile: return "curve";
  }
  return "unknown";
}

std::vector<double> parse_fraction_list(std::string_view text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    std::string item(text.substr(start, end - start));
    item.erase(0, item.find_first_not_of(' '));
    item.erase(item.find_last_not_of(' ') + 1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
      fail("fraction list item '" + item + "' is not a number");
    }
    out.push_back(value);
    start = end + 1;
  }
  return out;
}

std::optional<double> fraction_from_filename(std::string_view filename) {
  const std::string stem = fs::path(std::string(filename)).stem().string();
  // Last run of digits, optionally with one decimal point inside it.
  std::size_t end = stem.size();
  while (end > 0 && !std::isdigit(static_cast<unsigned char>(stem[end - 1]))) --end;
  if (end == 0) return std::nullopt;
  std::size_t begin = end;
  bool seen_point = false;
  while (begin > 0) {
    const char c = stem[begin - 1];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      --begin;
    } else if (c == '.' && !seen_point && begin >= 2 && std::isdigit(static_cast<unsigned char>(stem[begin - 2]))) {
      seen_point = true;
      --begin;
    } else {
      break;
    }
  }
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(stem.data() + begin, stem.data() + end, value);
  if (ec != std::errc() || ptr != stem.data() + end) return std::nullopt;
  if (value > 1.0) value /= 100.0;
  if (!(value > 0.0 && value <= 1.0)) return std::nullopt;
  return value;
}

std::vector<fs::path> expand_glob(const std::string& pattern) {
  glob_t result{};
  std::vector<fs::path> out;
  const int rc = ::glob(pattern.c_str(), 0, nullptr, &result);
  if (rc == 0) {
    for (std::size_t i = 0; i < result.gl_pathc; ++i) out.emplace_back(result.gl_pathv[i]);
  }
  globfree(&result);
  std::sort(out.begin(), out.end());
  return out;
}

bool needs_corpus(const RunConfig& config) {
  return std::any_of(config.techniques.begin(), config.techniques.end(),
                     [](const TechniqueConfig& t) { return t.kind != TechniqueKind::CurveFile; });
}

RunConfig parse(std::string_view json_text, const fs::path& base_dir, const Overrides& overrides) {
  Json doc;
  try {
    doc = Json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(doc, "", {"dataset", "sampling", "classifier", "techniques", "economics", "output"});

  // Overrides are applied to the document so the effective config can be
  // hashed and replayed.
  if (overrides.seed) doc["sampling"]["seed"] = *overrides.seed;
  if (overrides.fractions) doc["sampling"]["fractions"] = *overrides.fractions;
  if (overrides.output) doc["output"] = overrides.output->string();
  if (overrides.external_predictions) {
    bool replaced = false;
    if (doc.contains("techniques")) {
      for (auto& t : doc["techniques"]) {
        if (t.is_object() && t.value("kind", "") == "external") {
          t["predictions"] = *overrides.external_predictions;
          replaced = true;
          break;
        }
      }
    }
    if (!replaced && doc.contains("classifier") && doc["classifier"].is_object() &&
        doc["classifier"].value("kind", "") == "external") {
      doc["classifier"]["predictions"] = *overrides.external_predictions;
      replaced = true;
    }
    if (!replaced) {
      if (!doc.contains("techniques")) {
        doc["techniques"] = Json::array();
        if (doc.contains("classifier")) {
          doc["techniques"].push_back(doc["classifier"]);
          doc.erase("classifier");
        }
      }
      doc["techniques"].push_back({{"label", "external"}, {"kind", "external"},
                                   {"predictions", *overrides.external_predictions}});
    }
  }

  RunConfig config;
  config.effective = doc;

  // dataset
  if (auto it = doc.find("dataset"); it != doc.end()) {
    const auto& d = *it;
    check_keys(d, "dataset", {"input", "corpus", "source_label", "schema", "kind", "min_words"});
    if (auto p = get_string(d, "input", "dataset", ""); !p.empty()) config.dataset.input = resolve(base_dir, p);
    if (auto p = get_string(d, "corpus", "dataset", ""); !p.empty()) config.dataset.corpus = resolve(base_dir, p);
    config.dataset.source_label = get_string(d, "source_label", "dataset", "");
    config.dataset.min_words = get_size(d, "min_words", "dataset", 3);
    const auto kind = get_string(d, "kind", "dataset", "requires");
    if (kind == "requires") config.dataset.kind = corpus::DependencyKind::Requires;
    else if (kind == "relates_to") config.dataset.kind = corpus::DependencyKind::RelatesTo;
    else fail("dataset.kind must be requires or relates_to");
    if (auto s = d.find("schema"); s != d.end()) {
      check_keys(*s, "dataset.schema", {"id", "description", "depends_on", "blocks", "relates", "other"});
      auto& schema = config.dataset.schema;
      schema.id = get_string(*s, "id", "dataset.schema", schema.id);
      if (auto desc = s->find("description"); desc != s->end()) {
        schema.description.clear();
        if (desc->is_string()) {
          schema.description.push_back(desc->get<std::string>());
        } else if (desc->is_array() && !desc->empty()) {
          for (const auto& col : *desc) {
            if (!col.is_string()) fail("dataset.schema.description must hold column names");
            schema.description.push_back(col.get<std::string>());
          }
        } else {
          fail("dataset.schema.description must be a column name or a nonempty list of them");
        }
      }
      schema.depends_on = get_string(*s, "depends_on", "dataset.schema", schema.depends_on);
      schema.blocks = get_string(*s, "blocks", "dataset.schema", schema.blocks);
      schema.relates = get_string(*s, "relates", "dataset.schema", schema.relates);
      schema.other = get_string(*s, "other", "dataset.schema", schema.other);
    }
  }

  // sampling
  auto sampling = doc.find("sampling");
  if (sampling == doc.end() || !sampling->is_object() || !sampling->contains("seed")) {
    fail("sampling.seed is required (there is no clock-based default)");
  }
  check_keys(*sampling, "sampling", {"seed", "test_fraction", "fractions", "repeat_seeds"});
  config.sampling.seed = get_unsigned((*sampling)["seed"], "sampling.seed");
  config.sampling.test_fraction = get_number(*sampling, "test_fraction", "sampling", 0.2);
  if (!(config.sampling.test_fraction > 0.0 && config.sampling.test_fraction < 1.0)) {
    fail("sampling.test_fraction must lie in (0, 1)");
  }
  if (auto f = sampling->find("fractions"); f != sampling->end()) {
    if (!f->is_array()) fail("sampling.fractions must be an array of numbers");
    config.sampling.fractions.clear();
    for (const auto& v : *f) {
      if (!v.is_number()) fail("sampling.fractions must be an array of numbers");
      config.sampling.fractions.push_back(v.get<double>());
    }
  }
  check_fractions(config.sampling.fractions, config.sampling.test_fraction, "sampling.fractions");
  if (auto r = sampling->find("repeat_seeds"); r != sampling->end()) {
    if (!r->is_array()) fail("sampling.repeat_seeds must be an array");
    for (const auto& v : *r) config.sampling.repeat_seeds.push_back(get_unsigned(v, "sampling.repeat_seeds"));
  }

  // techniques
  const bool has_classifier = doc.contains("classifier");
  const bool has_techniques = doc.contains("techniques");
  if (has_classifier && has_techniques) fail("give either classifier or techniques, not both");
  if (has_classifier) {
    config.techniques.push_back(parse_technique(doc["classifier"], "classifier", base_dir));
  } else if (has_techniques) {
    const auto& list = doc["techniques"];
    if (!list.is_array() || list.empty()) fail("techniques must be a nonempty array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      config.techniques.push_back(parse_technique(list[i], "techniques[" + std::to_string(i) + "]", base_dir));
    }
  } else {
    config.techniques.push_back(parse_technique(Json::object(), "classifier", base_dir));
  }
  std::set<std::string> labels;
  for (const auto& t : config.techniques) {
    if (!labels.insert(t.label).second) fail("technique label '" + t.label + "' is used twice");
  }

  // economics
  if (auto e = doc.find("economics"); e != doc.end()) {
    check_keys(*e, "economics", {"profile", "parameters", "scenarios", "cost_mode", "decisions"});
    config.economics.profile = get_string(*e, "profile", "economics", "table5-default");
    config.economics.parameters = parse_parameters(*e, "economics", roi::CostParameters{});
    try {
      config.economics.cost_mode = harness::cost_mode_from_string(get_string(*e, "cost_mode", "economics", "per_iteration"));
    } catch (const Error&) {
      fail("economics.cost_mode must be per_iteration or cumulative");
    }
    if (auto dec = e->find("decisions"); dec != e->end()) {
      check_keys(*dec, "economics.decisions", {"epsilon_f1", "epsilon_roi"});
      auto& opts = config.economics.decisions;
      opts.epsilon_f1 = get_number(*dec, "epsilon_f1", "economics.decisions", opts.epsilon_f1);
      opts.epsilon_roi = get_number(*dec, "epsilon_roi", "economics.decisions", opts.epsilon_roi);
      if (!(opts.epsilon_f1 > 0.0) || !(opts.epsilon_roi > 0.0)) fail("economics.decisions epsilons must be > 0");
    }
    if (auto s = e->find("scenarios"); s != e->end()) {
      if (!s->is_array()) fail("economics.scenarios must be an array");
      std::set<std::string> names;
      for (std::size_t i = 0; i < s->size(); ++i) {
        const std::string where = "economics.scenarios[" + std::to_string(i) + "]";
        const auto& node = (*s)[i];
        check_keys(node, where, {"name", "profile", "parameters"});
        harness::Scenario scenario;
        scenario.name = get_string(node, "name", where, "");
        if (scenario.name.empty()) fail(where + ".name is required");
        if (!names.insert(scenario.name).second) fail("scenario name '" + scenario.name + "' is used twice");
        scenario.parameters = parse_parameters(node, where, config.economics.parameters);
        config.economics.scenarios.push_back(std::move(scenario));
      }
    }
  }

  if (auto o = doc.find("output"); o != doc.end()) {
    if (!o->is_string() || o->get<std::string>().empty()) fail("output must be a directory path");
    config.output = resolve(base_dir, o->get<std::string>());
  } else {
    config.output = base_dir / "roiml-out";
  }

  // Referenced paths must exist now, not halfway through a run.
  if (needs_corpus(config)) {
    if (config.dataset.corpus.empty() && config.dataset.input.empty()) {
      fail("dataset.input or dataset.corpus is required");
    }
    const auto& path = config.dataset.corpus.empty() ? config.dataset.input : config.dataset.corpus;
    const char* key = config.dataset.corpus.empty() ? "dataset.input" : "dataset.corpus";
    if (!fs::is_regular_file(path)) fail(std::string(key) + " '" + path.string() + "' does not exist");
  } else if (!config.dataset.input.empty() && !fs::is_regular_file(config.dataset.input)) {
    fail("dataset.input '" + config.dataset.input.string() + "' does not exist");
  }
  for (const auto& t : config.techniques) {
    if (t.kind == TechniqueKind::External) {
      const auto files = expand_glob(t.predictions_glob);
      if (files.empty()) fail("predictions for '" + t.label + "' match no file: " + t.predictions_glob);
      for (const auto& f : files) {
        if (!fraction_from_filename(f.filename().string())) {
          fail("cannot read a training fraction from prediction file name '" + f.filename().string() + "'");
        }
      }
    } else if (t.kind == TechniqueKind::CurveFile && !fs::is_regular_file(t.curve)) {
      fail("curve file for '" + t.label + "' does not exist: " + t.curve.string());
    }
  }
  return config;
}

RunConfig load(const fs::path& path, const Overrides& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Config, "config", "cannot read config file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), path.parent_path().empty() ? fs::path(".") : path.parent_path(), overrides);
}

}  // namespace roiml::config
