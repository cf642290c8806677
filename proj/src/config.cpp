#include "carleman/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "carleman/fixtures.hpp"

namespace carleman {

namespace {

using nlohmann::json;

class Reader {
 public:
  Reader(std::string source, std::filesystem::path base) : source_(std::move(source)), base_(std::move(base)) {}

  [[noreturn]] void fail(const toml::node* node, const std::string& field, const std::string& msg) const {
    std::ostringstream os;
    os << source_;
    if (node && node->source().begin.line > 0) os << ":" << node->source().begin.line << ":" << node->source().begin.column;
    os << ": " << field << ": " << msg;
    throw ConfigError(os.str());
  }

  void reject_unknown(const toml::table& t, const std::string& block, const std::set<std::string>& allowed) const {
    for (auto&& [k, v] : t)
      if (!allowed.count(std::string(k.str()))) {
        std::string list;
        for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
        fail(&v, block.empty() ? std::string(k.str()) : block + "." + std::string(k.str()),
             "unknown key (expected one of: " + list + ")");
      }
  }

  double number(const toml::node& n, const std::string& field) const {
    if (auto v = n.as_floating_point()) return v->get();
    if (auto v = n.as_integer()) return double(v->get());
    fail(&n, field, "expected a number");
  }

  int integer(const toml::node& n, const std::string& field) const {
    auto v = n.as_integer();
    if (!v) fail(&n, field, "expected an integer");
    if (v->get() < -2147483647 || v->get() > 2147483647) fail(&n, field, "integer out of range");
    return int(v->get());
  }

  bool boolean(const toml::node& n, const std::string& field) const {
    auto v = n.as_boolean();
    if (!v) fail(&n, field, "expected true or false");
    return v->get();
  }

  std::string string(const toml::node& n, const std::string& field) const {
    auto v = n.as_string();
    if (!v) fail(&n, field, "expected a string");
    return v->get();
  }

  std::vector<double> numbers(const toml::node& n, const std::string& field) const {
    std::vector<double> out;
    if (auto arr = n.as_array()) {
      for (std::size_t i = 0; i < arr->size(); ++i)
        out.push_back(number(*arr->get(i), field + "[" + std::to_string(i) + "]"));
      if (out.empty()) fail(&n, field, "empty list");
    } else {
      out.push_back(number(n, field));
    }
    return out;
  }

  // One profile term: "name" or {profile = "name", scale = x} or {file = "path", scale = x}.
  void profile_term(const toml::node& n, const std::string& field, const ProfileContext& ctx, ProfileEntry& e) const {
    json term;
    Profile p;
    double scale = 1.0;
    if (n.is_string()) {
      term["profile"] = string(n, field);
    } else if (auto t = n.as_table()) {
      reject_unknown(*t, field, {"profile", "file", "scale"});
      const toml::node* name = t->get("profile");
      const toml::node* file = t->get("file");
      if (!!name == !!file) fail(&n, field, "give exactly one of 'profile' or 'file'");
      if (name) term["profile"] = string(*name, field + ".profile");
      if (file) term["file"] = string(*file, field + ".file");
      if (const toml::node* sc = t->get("scale")) scale = number(*sc, field + ".scale");
    } else {
      fail(&n, field, "expected a profile name, a {profile, scale} table or a list of them");
    }
    if (term.contains("profile")) {
      try {
        p = make_profile(term["profile"].get<std::string>(), ctx);
      } catch (const ConfigError& err) {
        fail(&n, field, err.what());
      }
    } else {
      const std::filesystem::path path = base_ / term["file"].get<std::string>();
      std::ifstream in(path);
      if (!in) fail(&n, field, "cannot open '" + path.string() + "'");
      try {
        p = tabulated_profile(in, path.filename().string());
      } catch (const ConfigError& err) {
        fail(&n, field, err.what());
      }
    }
    term["scale"] = scale;
    e.spec.push_back(term);
    Profile scaled = p.scaled(scale);
    e.profile = e.profile.empty() ? scaled : e.profile + scaled;
  }

  ProfileEntry profile(const toml::node& n, const std::string& field, const ProfileContext& ctx) const {
    ProfileEntry e;
    e.spec = json::array();
    if (auto arr = n.as_array()) {
      if (arr->empty()) fail(&n, field, "empty profile list");
      for (std::size_t i = 0; i < arr->size(); ++i)
        profile_term(*arr->get(i), field + "[" + std::to_string(i) + "]", ctx, e);
    } else {
      profile_term(n, field, ctx, e);
    }
    return e;
  }

 private:
  std::string source_;
  std::filesystem::path base_;
};

ProfileEntry named(const std::string& name, double scale, const ProfileContext& ctx) {
  ProfileEntry e;
  e.spec = json::array({json{{"profile", name}, {"scale", scale}}});
  e.profile = make_profile(name, ctx).scaled(scale);
  return e;
}

// x - y, keeping the spec as a flat sum of terms.
ProfileEntry difference(const ProfileEntry& x, const ProfileEntry& y) {
  ProfileEntry e;
  e.spec = json::array();
  for (const json& t : x.spec)
    if (t.value("profile", "") != "zero") e.spec.push_back(t);
  for (json t : y.spec) {
    if (t.value("profile", "") == "zero") continue;
    t["scale"] = -t["scale"].get<double>();
    e.spec.push_back(t);
  }
  e.profile = x.profile - y.profile;
  return e;
}

const toml::table* block(const Reader& r, const toml::table& root, const char* name) {
  const toml::node* n = root.get(name);
  if (!n) return nullptr;
  if (!n->is_table()) r.fail(n, name, "expected a table");
  return n->as_table();
}

std::uint64_t parse_seed(const std::string& text, const std::string& what) {
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos)
    throw ConfigError(what + ": seed must be a nonnegative integer, got '" + text + "'");
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(text.c_str(), &end, 10);
  if (errno == ERANGE) throw ConfigError(what + ": seed out of range");
  return v;
}

}  // namespace

StripGrid RunConfig::build_grid() const { return carleman::build_grid(grid.L, grid.d, grid.T, grid.n1, grid.n2, grid.nt); }

json RunConfig::to_json() const {
  json j;
  j["grid"] = {{"L", grid.L}, {"d", grid.d}, {"T", grid.T}, {"n1", grid.n1}, {"n2", grid.n2}, {"nt", grid.nt}};
  j["weights"] = {{"beta_tilde", weights.beta_tilde.spec}, {"m", weights.m}, {"lambda", weights.lambda}, {"s", weights.s}};
  j["coefficients"] = {{"a", coefficients.a.spec},         {"b", coefficients.b.spec},
                       {"a_tilde", coefficients.a_tilde.spec}, {"b_tilde", coefficients.b_tilde.spec},
                       {"alpha", coefficients.alpha.spec}, {"gamma", coefficients.gamma.spec}};
  j["fixture"] = {{"q_tilde", fixture.q_tilde}, {"audit", fixture.audit}};
  j["run"] = {{"seed", run.seed},
              {"noise_level", run.noise_level},
              {"smooth", run.smooth},
              {"side", run.side == Side::GammaPlus ? "gamma-plus" : "gamma-minus"},
              {"variant", run.variant},
              {"levels", run.levels},
              {"refine_n1", run.refine_n1},
              {"gap_scales", run.gap_scales},
              {"stability_lambda", run.stability_lambda},
              {"export_fields", run.export_fields},
              {"out", run.out}};
  return j;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string RunConfig::digest() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(to_json().dump())));
  return buf;
}

RunConfig parse_config(const std::string& text, const std::string& source, const std::filesystem::path& base_dir,
                       const char* env_seed) {
  Reader r(source, base_dir);
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error& err) {
    std::ostringstream os;
    os << source << ":" << err.source().begin.line << ":" << err.source().begin.column << ": " << err.description();
    throw ConfigError(os.str());
  }
  r.reject_unknown(root, "", {"grid", "weights", "coefficients", "fixture", "run"});

  RunConfig c;
  c.source = source;

  if (auto t = block(r, root, "grid")) {
    r.reject_unknown(*t, "grid", {"L", "d", "T", "n1", "n2", "nt"});
    if (auto n = t->get("L")) c.grid.L = r.number(*n, "grid.L");
    if (auto n = t->get("d")) c.grid.d = r.number(*n, "grid.d");
    if (auto n = t->get("T")) c.grid.T = r.number(*n, "grid.T");
    if (auto n = t->get("n1")) c.grid.n1 = r.integer(*n, "grid.n1");
    if (auto n = t->get("n2")) c.grid.n2 = r.integer(*n, "grid.n2");
    if (auto n = t->get("nt")) c.grid.nt = r.integer(*n, "grid.nt");
  }
  if (c.grid.nt % 2 != 0) r.fail(root.get("grid"), "grid.nt", "nt must be even so that t = 0 is a time level");
  try {
    (void)c.build_grid();
  } catch (const ConfigError& err) {
    throw ConfigError(source + ": grid: " + err.what());
  }
  const ProfileContext ctx = c.context();

  c.weights.beta_tilde = named("exp-decreasing", 1.0, ctx);
  if (auto t = block(r, root, "weights")) {
    r.reject_unknown(*t, "weights", {"beta_tilde", "m", "lambda", "s"});
    if (auto n = t->get("beta_tilde")) c.weights.beta_tilde = r.profile(*n, "weights.beta_tilde", ctx);
    if (auto n = t->get("m")) {
      c.weights.m = r.number(*n, "weights.m");
      if (!(c.weights.m > 1.0)) r.fail(n, "weights.m", "m must satisfy m > 1");
    }
    if (auto n = t->get("lambda")) c.weights.lambda = r.numbers(*n, "weights.lambda");
    if (auto n = t->get("s")) c.weights.s = r.numbers(*n, "weights.s");
    for (double v : c.weights.lambda)
      if (!(v > 0.0)) r.fail(t->get("lambda"), "weights.lambda", "every lambda must be > 0");
    for (double v : c.weights.s)
      if (!(v > 0.0)) r.fail(t->get("s"), "weights.s", "every s must be > 0");
  }

  auto& co = c.coefficients;
  co.a_tilde = named("quadratic", 1.0, ctx);
  co.b_tilde = named("constant", -1.0, ctx);
  co.alpha = named("zero", 1.0, ctx);
  co.gamma = named("zero", 1.0, ctx);
  bool has_a = false, has_b = false;
  if (auto t = block(r, root, "coefficients")) {
    r.reject_unknown(*t, "coefficients", {"a", "b", "a_tilde", "b_tilde", "alpha", "gamma"});
    if (t->get("a") && t->get("alpha")) r.fail(t->get("alpha"), "coefficients.alpha", "give either a or alpha, not both");
    if (t->get("b") && t->get("gamma")) r.fail(t->get("gamma"), "coefficients.gamma", "give either b or gamma, not both");
    if (auto n = t->get("a_tilde")) co.a_tilde = r.profile(*n, "coefficients.a_tilde", ctx);
    if (auto n = t->get("b_tilde")) co.b_tilde = r.profile(*n, "coefficients.b_tilde", ctx);
    if (auto n = t->get("alpha")) co.alpha = r.profile(*n, "coefficients.alpha", ctx);
    if (auto n = t->get("gamma")) co.gamma = r.profile(*n, "coefficients.gamma", ctx);
    if (auto n = t->get("a")) {
      co.a = r.profile(*n, "coefficients.a", ctx);
      has_a = true;
    }
    if (auto n = t->get("b")) {
      co.b = r.profile(*n, "coefficients.b", ctx);
      has_b = true;
    }
  }
  if (has_a) co.alpha = difference(co.a_tilde, co.a);
  else co.a = difference(co.a_tilde, co.alpha);
  if (has_b) co.gamma = difference(co.b_tilde, co.b);
  else co.b = difference(co.b_tilde, co.gamma);

  if (auto t = block(r, root, "fixture")) {
    r.reject_unknown(*t, "fixture", {"q_tilde", "audit"});
    const auto names = fixture_names();
    auto check = [&](const char* key, std::string& dst) {
      if (auto n = t->get(key)) {
        dst = r.string(*n, std::string("fixture.") + key);
        if (std::find(names.begin(), names.end(), dst) == names.end())
          r.fail(n, std::string("fixture.") + key, "unknown fixture '" + dst + "'");
      }
    };
    check("q_tilde", c.fixture.q_tilde);
    check("audit", c.fixture.audit);
  }

  if (auto t = block(r, root, "run")) {
    r.reject_unknown(*t, "run",
                     {"seed", "noise_level", "smooth", "side", "variant", "levels", "refine_n1", "gap_scales",
                      "stability_lambda", "export_fields", "out"});
    if (auto n = t->get("seed")) {
      auto v = n->as_integer();
      if (!v || v->get() < 0) r.fail(n, "run.seed", "expected a nonnegative integer");
      c.run.seed = std::uint64_t(v->get());
    }
    if (auto n = t->get("noise_level")) {
      c.run.noise_level = r.number(*n, "run.noise_level");
      if (!(c.run.noise_level >= 0.0)) r.fail(n, "run.noise_level", "must be >= 0");
    }
    if (auto n = t->get("smooth")) c.run.smooth = r.boolean(*n, "run.smooth");
    if (auto n = t->get("side")) {
      const std::string s = r.string(*n, "run.side");
      if (s == "gamma-plus") c.run.side = Side::GammaPlus;
      else if (s == "gamma-minus") c.run.side = Side::GammaMinus;
      else r.fail(n, "run.side", "expected \"gamma-plus\" or \"gamma-minus\"");
    }
    if (auto n = t->get("variant")) {
      c.run.variant = r.integer(*n, "run.variant");
      if (c.run.variant != 1 && c.run.variant != 2) r.fail(n, "run.variant", "expected 1 or 2");
    }
    if (auto n = t->get("levels")) {
      c.run.levels = r.integer(*n, "run.levels");
      if (c.run.levels < 2) r.fail(n, "run.levels", "need at least 2 grids");
    }
    if (auto n = t->get("refine_n1")) c.run.refine_n1 = r.boolean(*n, "run.refine_n1");
    if (auto n = t->get("gap_scales")) {
      c.run.gap_scales = r.numbers(*n, "run.gap_scales");
      for (double v : c.run.gap_scales)
        if (!(v > 0.0)) r.fail(n, "run.gap_scales", "every scale must be > 0");
    }
    if (auto n = t->get("stability_lambda")) {
      c.run.stability_lambda = r.number(*n, "run.stability_lambda");
      if (!(c.run.stability_lambda > 0.0)) r.fail(n, "run.stability_lambda", "must be > 0");
    }
    if (auto n = t->get("export_fields")) c.run.export_fields = r.boolean(*n, "run.export_fields");
    if (auto n = t->get("out")) c.run.out = r.string(*n, "run.out");
  }

  if (env_seed) {
    c.run.seed = parse_seed(env_seed, "CARLEMAN_LAB_SEED");
    c.run.seed_from_env = true;
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string(), path.parent_path(), std::getenv("CARLEMAN_LAB_SEED"));
}

}  // namespace carleman
