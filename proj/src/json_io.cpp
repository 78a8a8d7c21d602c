#include "fdrlab/json_io.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>

namespace fdrlab {

using nlohmann::json;

namespace {

void expect_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  expect_object(j, where);
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) ok |= it.key() == k;
    if (!ok) throw ConfigError(where + ": unknown key \"" + it.key() + "\"");
  }
}

const json& require(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(where + ": missing key \"" + key + "\"");
  return *it;
}

double require_number(const json& j, const char* key, const std::string& where) {
  const json& v = require(j, key, where);
  if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
  return v.get<double>();
}

double number_or(const json& j, const char* key, double fallback, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number()) throw ConfigError(where + "." + key + ": expected a number");
  return it->get<double>();
}

json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

json to_json(const DistributionSpec& spec) {
  return std::visit(
      [](const auto& d) -> json {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, NormalSpec>) {
          return {{"kind", "normal"}, {"mu", d.mu}, {"sigma", d.sigma}};
        } else if constexpr (std::is_same_v<T, NoncentralTSpec>) {
          return {{"kind", "nct"}, {"nu", d.nu}, {"delta", d.delta}};
        } else if constexpr (std::is_same_v<T, NoncentralFSpec>) {
          return {{"kind", "ncf"}, {"p", d.p}, {"nu", d.nu}, {"delta", d.delta}};
        } else if constexpr (std::is_same_v<T, GaussianMixtureSpec>) {
          json comps = json::array();
          for (const auto& c : d.components)
            comps.push_back({{"weight", c.weight}, {"mu", c.mu}, {"sigma", c.sigma}});
          return {{"kind", "gauss_mix"}, {"components", comps}};
        } else {
          return {{"kind", "cauchy"}, {"s", d.s}};
        }
      },
      spec);
}

DistributionSpec distribution_from_json(const json& j, const std::string& where) {
  expect_object(j, where);
  std::string kind = require(j, "kind", where).get<std::string>();
  DistributionSpec spec;
  if (kind == "normal") {
    check_keys(j, {"kind", "mu", "sigma"}, where);
    spec = NormalSpec{number_or(j, "mu", 0.0, where), number_or(j, "sigma", 1.0, where)};
  } else if (kind == "nct") {
    check_keys(j, {"kind", "nu", "delta"}, where);
    spec = NoncentralTSpec{require_number(j, "nu", where), number_or(j, "delta", 0.0, where)};
  } else if (kind == "ncf") {
    check_keys(j, {"kind", "p", "nu", "delta"}, where);
    spec = NoncentralFSpec{require_number(j, "p", where), require_number(j, "nu", where),
                           number_or(j, "delta", 0.0, where)};
  } else if (kind == "gauss_mix") {
    check_keys(j, {"kind", "components"}, where);
    const json& comps = require(j, "components", where);
    if (!comps.is_array() || comps.empty())
      throw ConfigError(where + ".components: expected a non-empty array");
    GaussianMixtureSpec mix;
    for (std::size_t i = 0; i < comps.size(); ++i) {
      const std::string cw = where + ".components[" + std::to_string(i) + "]";
      check_keys(comps[i], {"weight", "mu", "sigma"}, cw);
      mix.components.push_back({require_number(comps[i], "weight", cw),
                                require_number(comps[i], "mu", cw),
                                require_number(comps[i], "sigma", cw)});
    }
    spec = std::move(mix);
  } else if (kind == "cauchy") {
    check_keys(j, {"kind", "s"}, where);
    spec = CauchyScaleSpec{require_number(j, "s", where)};
  } else {
    throw ConfigError(where + ".kind: unknown distribution \"" + kind + "\"");
  }
  try {
    validate(spec);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return spec;
}

json to_json(const RandomEffectsModel& model) {
  return {{"pi", model.pi},
          {"null", to_json(model.null_dist)},
          {"alt", to_json(model.alt_dist)},
          {"tail", tail_name(model.tail)}};
}

RandomEffectsModel model_from_json(const json& j, const std::string& where) {
  check_keys(j, {"pi", "null", "alt", "tail"}, where);
  RandomEffectsModel m;
  m.pi = require_number(j, "pi", where);
  m.null_dist = distribution_from_json(require(j, "null", where), where + ".null");
  m.alt_dist = distribution_from_json(require(j, "alt", where), where + ".alt");
  std::string tail = j.contains("tail") ? j.at("tail").get<std::string>() : "right";
  if (tail == "right")
    m.tail = TailRule::RightTail;
  else if (tail == "two")
    m.tail = TailRule::TwoTail;
  else if (tail == "left")
    m.tail = TailRule::LeftTail;
  else
    throw ConfigError(where + ".tail: expected \"right\", \"two\" or \"left\"");
  try {
    validate(m);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return m;
}

json to_json(const CriticalitySummary& s) {
  json j{{"alpha", s.alpha},
         {"alpha_star", s.alpha_star},
         {"beta_star", s.beta_star},
         {"sup_fprime", finite_or_null(s.sup_fprime)},
         {"u_star", s.u_star},
         {"p_star", s.p_star},
         {"q_star", s.q_star},
         {"delta_gap", s.delta_gap},
         {"u_star_converged", s.u_star_converged},
         {"tangent", s.tangent}};
  j["lil_lambda"] = s.lil_lambda ? json(*s.lil_lambda) : json(nullptr);
  j["fprime_u_star"] = s.fprime_u_star ? json(*s.fprime_u_star) : json(nullptr);
  j["nu0"] = s.nu0 ? json(*s.nu0) : json(nullptr);
  return j;
}

json to_json(const RejectionResult& r) {
  json j{{"n", r.n},
         {"n_false_null", r.n_false_null},
         {"rejections", r.rejections},
         {"false_rejections", r.false_rejections},
         {"power", r.power},
         {"fdp", r.fdp},
         {"rejected", r.rejected}};
  j["threshold"] = r.threshold ? json(*r.threshold) : json(nullptr);
  return j;
}

json to_json(const ProcMResult& r) {
  json points = json::array();
  for (const auto& rp : r.per_point) {
    points.push_back({{"t", rp.t},
                      {"r_plus", rp.r_plus},
                      {"r_minus", rp.r_minus},
                      {"L", rp.L},
                      {"U", rp.U},
                      {"t_minus", rp.t_minus},
                      {"t_plus", rp.t_plus},
                      {"empty", rp.empty()}});
  }
  json intervals = json::array();
  for (const auto& iv : r.rejection_intervals) intervals.push_back({iv.first, iv.second});
  return {{"n", r.n},
          {"n_false_null", r.n_false_null},
          {"rejections", r.rejections},
          {"false_rejections", r.false_rejections},
          {"power", r.power},
          {"fdp", r.fdp},
          {"min_rejections", r.min_rejections},
          {"selected", r.selected},
          {"rejection_intervals", intervals},
          {"per_point", points},
          {"rejected", r.rejected}};
}

json to_json(const McEstimates& est) {
  json procs = json::array();
  for (const auto& pe : est.procedures) {
    json p{{"procedure", pe.procedure},
           {"fdr_hat", pe.fdr_hat},
           {"pfdr_hat", finite_or_null(pe.pfdr_hat)},
           {"power_hat", pe.power_hat},
           {"n_positive", pe.n_positive},
           {"pmf_hat", pe.pmf_hat},
           {"rejections", pe.rejections},
           {"false_rejections", pe.false_rejections},
           {"power", pe.power}};
    p["kl_to_reference"] = pe.kl_to_reference ? json(*pe.kl_to_reference) : json(nullptr);
    p["kl_finite"] = pe.kl_finite ? json(*pe.kl_finite) : json(nullptr);
    p["tv_to_reference"] = pe.tv_to_reference ? json(*pe.tv_to_reference) : json(nullptr);
    procs.push_back(std::move(p));
  }
  json j{{"seed", est.seed},
         {"n", est.n},
         {"runs", est.runs},
         {"alpha", est.alpha},
         {"procedures", procs}};
  if (est.lil) {
    json q = json::array();
    for (const auto& [t, v] : est.lil->q_hat) q.push_back({{"t", t}, {"q_hat", v}});
    j["lil"] = {{"alpha_star", est.lil->alpha_star},
                {"p_star", est.lil->p_star},
                {"fprime_u_star", est.lil->fprime_u_star},
                {"lambda", est.lil->lambda},
                {"sizes", est.lil->sizes},
                {"max_abs_l", est.lil->max_abs_l},
                {"q_hat", q}};
  }
  if (est.cover) {
    json curves = json::object();
    for (const auto& [tag, curve] : est.cover->p_cover) curves[tag] = curve;
    j["cover"] = {{"grid", est.cover->grid},
                  {"fprime", est.cover->fprime},
                  {"p_cover", curves}};
  }
  return j;
}

McEstimates estimates_from_json(const json& j) {
  McEstimates est;
  est.seed = j.at("seed").get<std::uint64_t>();
  est.n = j.at("n").get<std::size_t>();
  est.runs = j.at("runs").get<std::size_t>();
  est.alpha = j.at("alpha").get<double>();
  for (const auto& p : j.at("procedures")) {
    ProcedureEstimates pe;
    pe.procedure = p.at("procedure").get<std::string>();
    pe.fdr_hat = p.at("fdr_hat").get<double>();
    pe.pfdr_hat = p.at("pfdr_hat").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                             : p.at("pfdr_hat").get<double>();
    pe.power_hat = p.at("power_hat").get<double>();
    pe.n_positive = p.at("n_positive").get<std::size_t>();
    pe.pmf_hat = p.at("pmf_hat").get<std::vector<double>>();
    pe.rejections = p.at("rejections").get<std::vector<std::size_t>>();
    pe.false_rejections = p.at("false_rejections").get<std::vector<std::size_t>>();
    pe.power = p.at("power").get<std::vector<double>>();
    if (!p.at("kl_to_reference").is_null())
      pe.kl_to_reference = p.at("kl_to_reference").get<double>();
    if (!p.at("kl_finite").is_null()) pe.kl_finite = p.at("kl_finite").get<bool>();
    if (!p.at("tv_to_reference").is_null())
      pe.tv_to_reference = p.at("tv_to_reference").get<double>();
    est.procedures.push_back(std::move(pe));
  }
  if (j.contains("lil")) {
    const json& l = j.at("lil");
    LilBlock block;
    block.alpha_star = l.at("alpha_star").get<double>();
    block.p_star = l.at("p_star").get<double>();
    block.fprime_u_star = l.at("fprime_u_star").get<double>();
    block.lambda = l.at("lambda").get<double>();
    block.sizes = l.at("sizes").get<std::vector<std::size_t>>();
    block.max_abs_l = l.at("max_abs_l").get<std::vector<double>>();
    std::size_t i = 0;
    for (const auto& q : l.at("q_hat"))
      block.q_hat[i++] = {q.at("t").get<double>(), q.at("q_hat").get<double>()};
    est.lil = std::move(block);
  }
  if (j.contains("cover")) {
    const json& c = j.at("cover");
    CoverBlock block;
    block.grid = c.at("grid").get<std::vector<double>>();
    block.fprime = c.at("fprime").get<std::vector<double>>();
    for (auto it = c.at("p_cover").begin(); it != c.at("p_cover").end(); ++it)
      block.p_cover.emplace_back(it.key(), it.value().get<std::vector<double>>());
    est.cover = std::move(block);
  }
  return est;
}

std::vector<double> refpoints_from_json(const json& j, const std::string& where) {
  std::vector<double> pts;
  if (j.is_array()) {
    for (const auto& v : j) {
      if (!v.is_number()) throw ConfigError(where + ": reference points must be numbers");
      pts.push_back(v.get<double>());
    }
  } else if (j.is_object()) {
    check_keys(j, {"start", "step", "count"}, where);
    double start = require_number(j, "start", where);
    double step = require_number(j, "step", where);
    double count = require_number(j, "count", where);
    for (std::size_t i = 0; i < static_cast<std::size_t>(count); ++i)
      pts.push_back(start + step * static_cast<double>(i));
  } else {
    throw ConfigError(where + ": expected an array or {start, step, count}");
  }
  for (double& t : pts) {
    if (std::abs(t) <= 1e-12) t = 0.0;
    if (std::abs(t - 1.0) <= 1e-12) t = 1.0;
  }
  return pts;
}

namespace {

ExperimentConfig experiment_section(const json& j, const Manifest& base,
                                    const std::string& where, bool lil_section) {
  ExperimentConfig cfg;
  cfg.model = base.model;
  cfg.alpha = base.alpha;
  cfg.seed = base.seed;
  cfg.threads = base.threads;
  if (lil_section) {
    check_keys(j, {"runs", "schedule"}, where);
    cfg.runs = static_cast<std::size_t>(number_or(j, "runs", 100, where));
    LilSchedule sched;
    if (j.contains("schedule")) {
      const json& s = j.at("schedule");
      check_keys(s, {"base", "step", "count"}, where + ".schedule");
      sched.base = number_or(s, "base", sched.base, where + ".schedule");
      sched.step = number_or(s, "step", sched.step, where + ".schedule");
      sched.count = static_cast<std::size_t>(
          number_or(s, "count", static_cast<double>(sched.count), where + ".schedule"));
    }
    cfg.lil = sched;
    cfg.n = sched.sample_size();
    return cfg;
  }
  check_keys(j, {"n", "runs", "procedures", "refpoints", "grid_points", "c"}, where);
  cfg.n = static_cast<std::size_t>(number_or(j, "n", 1000, where));
  cfg.runs = static_cast<std::size_t>(number_or(j, "runs", 100, where));
  if (j.contains("procedures")) {
    for (const auto& p : j.at("procedures")) {
      const std::string pw = where + ".procedures[]";
      check_keys(p, {"kind", "c"}, pw);
      std::string kind = require(p, "kind", pw).get<std::string>();
      if (kind == "bh")
        cfg.procedures.push_back({ProcedureSpec::Kind::BH, 0.0});
      else if (kind == "m")
        cfg.procedures.push_back({ProcedureSpec::Kind::M, number_or(p, "c", 0.0, pw)});
      else
        throw ConfigError(pw + ".kind: expected \"bh\" or \"m\"");
    }
  }
  if (j.contains("refpoints"))
    cfg.refpoints = refpoints_from_json(j.at("refpoints"), where + ".refpoints");
  if (j.contains("grid_points")) {
    std::size_t g = static_cast<std::size_t>(require_number(j, "grid_points", where));
    if (g < 2) throw ConfigError(where + ".grid_points: need at least 2");
    cfg.cover_grid.resize(g);
    for (std::size_t i = 0; i < g; ++i)
      cfg.cover_grid[i] = static_cast<double>(i) / static_cast<double>(g - 1);
  }
  return cfg;
}

}  // namespace

Manifest manifest_from_json(const json& j, const std::string& where) {
  check_keys(j, {"model", "alpha", "seed", "threads", "theory", "mc", "lil", "cover", "procm"},
             where);
  Manifest m;
  m.model = model_from_json(require(j, "model", where), where + ".model");
  m.alpha = require_number(j, "alpha", where);
  if (!(m.alpha > 0.0 && m.alpha < 1.0))
    throw ConfigError(where + ".alpha: must be in (0, 1)");
  m.seed = static_cast<std::uint64_t>(number_or(j, "seed", 1.0, where));
  m.threads = static_cast<int>(number_or(j, "threads", 0.0, where));
  if (j.contains("theory")) {
    check_keys(j.at("theory"), {"ell"}, where + ".theory");
    if (j.at("theory").contains("ell"))
      m.theory_ell = static_cast<long>(require_number(j.at("theory"), "ell", where + ".theory"));
  }
  if (j.contains("mc")) m.mc = experiment_section(j.at("mc"), m, where + ".mc", false);
  if (j.contains("lil")) m.lil = experiment_section(j.at("lil"), m, where + ".lil", true);
  if (j.contains("cover")) m.cover = experiment_section(j.at("cover"), m, where + ".cover", false);
  if (j.contains("procm")) m.procm = experiment_section(j.at("procm"), m, where + ".procm", false);
  return m;
}

Manifest load_manifest(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config \"" + path + "\": cannot open for reading");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config \"" + path + "\": " + e.what());
  }
  for (const std::string& ov : overrides) {
    auto eq = ov.find('=');
    if (eq == std::string::npos)
      throw ConfigError("override \"" + ov + "\": expected key=value");
    std::string key = ov.substr(0, eq);
    std::string value = ov.substr(eq + 1);
    std::string pointer = "/";
    for (char ch : key) pointer.push_back(ch == '.' ? '/' : ch);
    json parsed;
    try {
      parsed = json::parse(value);
    } catch (const json::parse_error&) {
      parsed = value;  // bare strings are allowed
    }
    j[json::json_pointer(pointer)] = parsed;
  }
  return manifest_from_json(j, "config \"" + path + "\"");
}

}  // namespace fdrlab
