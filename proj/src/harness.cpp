#include "relclock/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "relclock/gppt.hpp"
#include "relclock/rng.hpp"

namespace relclock::harness {

using nlohmann::json;

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::PawObserver: return "paw-observer";
    case Mode::PawSuperobserver: return "paw-superobserver";
    case Mode::Gppt: return "gppt";
  }
  return "unknown";
}

std::optional<Mode> mode_from_string(const std::string& name) {
  if (name == "paw-observer") return Mode::PawObserver;
  if (name == "paw-superobserver") return Mode::PawSuperobserver;
  if (name == "gppt") return Mode::Gppt;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Config

namespace {

template <typename T>
void read_field(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config field '") + key + "' has the wrong type");
  }
}

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text, std::optional<Mode> cli_mode) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig config;
  if (cli_mode) config.mode = *cli_mode;
  if (j.contains("mode")) {
    std::string name;
    read_field(j, "mode", name);
    const std::optional<Mode> mode = mode_from_string(name);
    if (!mode) throw ConfigError("unknown mode '" + name + "'");
    if (cli_mode && *mode != *cli_mode)
      throw ConfigError("config mode '" + name + "' conflicts with the chosen subcommand");
    config.mode = *mode;
  } else if (!cli_mode) {
    throw ConfigError("mode missing");
  }
  read_field(j, "omega", config.omega);
  read_field(j, "plate_A_values", config.plate_A_values);
  read_field(j, "delta_B_values", config.delta_B_values);
  read_field(j, "shots", config.shots);
  read_field(j, "exposure", config.exposure);
  read_field(j, "seed", config.seed);
  read_field(j, "output_path", config.output_path);
  read_field(j, "format", config.format);
  read_field(j, "timestamp", config.timestamp);
  read_field(j, "tomography_dump_dir", config.tomography_dump_dir);
  return config;
}

void validate(const ExperimentConfig& config) {
  if (!(config.omega > 0.0) || !std::isfinite(config.omega)) throw ConfigError("omega must be > 0");
  const bool needs_plates = config.mode != Mode::Gppt || config.shots > 0;
  if (needs_plates && config.plate_A_values.empty()) throw ConfigError("plate_A_values empty");
  for (double v : config.plate_A_values)
    if (!std::isfinite(v)) throw ConfigError("plate_A_values must be finite");
  if (config.mode == Mode::Gppt) {
    if (config.delta_B_values.empty()) throw ConfigError("delta_B_values empty");
    for (double v : config.delta_B_values)
      if (!std::isfinite(v)) throw ConfigError("delta_B_values must be finite");
  }
  if (config.shots < 0) throw ConfigError("shots must be >= 0");
  if (config.exposure < 0) throw ConfigError("exposure must be >= 0");
  if (config.format != "csv" && config.format != "json")
    throw ConfigError("format must be 'csv' or 'json'");
}

std::vector<double> equispaced(int n) {
  if (n < 1) throw ConfigError("--equispaced needs N >= 1");
  std::vector<double> out;
  out.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    out.push_back(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
  return out;
}

// ---------------------------------------------------------------------------
// Runners

namespace {

RunRecord new_record(const ExperimentConfig& config) {
  RunRecord rec;
  rec.config = config;
  rec.tool_version = kToolVersion;
  rec.format_version = kFormatVersion;
  rec.timestamp = config.timestamp;
  return rec;
}

RunRecord run_paw_observer(const ExperimentConfig& config) {
  RunRecord rec = new_record(config);
  const paw::PawState state = paw::make_singlet(config.omega);
  std::vector<optics_mc::CoincidenceTable> tables;
  // Plate-averaged joint weights for the observer's own two-time view.
  double j31 = 0.0, j32 = 0.0, j41 = 0.0, j42 = 0.0;
  for (size_t i = 0; i < config.plate_A_values.size(); ++i) {
    const double plate = config.plate_A_values[i];
    const double T = plate / config.omega;
    ObserverPoint point;
    point.plate_A = plate;
    point.analytic = paw::observer_conditionals(state, T);
    const qcore::Ket psi_t = paw::evolve_global(state, T);
    j31 += std::norm(psi_t.amplitude(qcore::kHV));
    j32 += std::norm(psi_t.amplitude(qcore::kVV));
    j41 += std::norm(psi_t.amplitude(qcore::kHH));
    j42 += std::norm(psi_t.amplitude(qcore::kVH));
    if (config.shots > 0) {
      optics_mc::ShotConfig shot_config;
      shot_config.n_shots = config.shots;
      shot_config.seed = rng::derive_seed(config.seed, static_cast<std::uint64_t>(i));
      shot_config.mode = optics_mc::Mode::PawObserver;
      shot_config.plate_A_list = {plate};
      shot_config.omega = config.omega;
      tables.push_back(optics_mc::sample_shots(shot_config));
      point.estimates = optics_mc::estimate_conditionals(tables.back());
    }
    rec.observer_points.push_back(std::move(point));
  }

  const double n = static_cast<double>(config.plate_A_values.size());
  ObserverInset inset;
  inset.t1 = state.clock.t1;
  inset.t2 = state.clock.t2;
  inset.analytic.denom1 = (j31 + j41) / n;
  inset.analytic.denom2 = (j32 + j42) / n;
  if (inset.analytic.denom1 >= qcore::kNullOutcomeProb) {
    inset.analytic.p31 = j31 / (j31 + j41);
    inset.analytic.p41 = j41 / (j31 + j41);
  }
  if (inset.analytic.denom2 >= qcore::kNullOutcomeProb) {
    inset.analytic.p32 = j32 / (j32 + j42);
    inset.analytic.p42 = j42 / (j32 + j42);
  }
  if (config.shots > 0) {
    optics_mc::CoincidenceTable total;
    total.seed = config.seed;
    for (const optics_mc::CoincidenceTable& t : tables) {
      total.n31 += t.n31;
      total.n32 += t.n32;
      total.n41 += t.n41;
      total.n42 += t.n42;
      total.discarded += t.discarded;
      total.n_shots += t.n_shots;
    }
    inset.estimates = optics_mc::estimate_conditionals(total);
  }
  rec.inset = inset;
  return rec;
}

RunRecord run_paw_superobserver(const ExperimentConfig& config) {
  RunRecord rec = new_record(config);
  const paw::PawState state = paw::make_singlet(config.omega);
  const std::vector<tomography::ProjectionSetting> settings = tomography::standard_16_settings();
  for (size_t i = 0; i < config.plate_A_values.size(); ++i) {
    const double plate = config.plate_A_values[i];
    const double T = plate / config.omega;
    const paw::ErasedState erased = paw::superobserver_erased_state(state, T);
    SuperobserverPoint point;
    point.plate_A = plate;
    point.fidelity_exact = qcore::fidelity_pure(erased.state, state.psi);
    point.postselect_prob = erased.postselect_prob;
    if (config.exposure > 0) {
      const std::uint64_t point_seed = rng::derive_seed(config.seed, static_cast<std::uint64_t>(i));
      const tomography::TomographyData data =
          tomography::simulate_counts(erased.state, settings, config.exposure, point_seed);
      if (!config.tomography_dump_dir.empty()) {
        char name[64];
        std::snprintf(name, sizeof name, "/tomography_point_%03zu.csv", i);
        write_text_file(config.tomography_dump_dir + name, tomography_data_to_csv(data));
      }
      const tomography::ReconstructionResult mle = tomography::reconstruct_mle(data);
      point.fidelity_mle = tomography::fidelity_report(mle, state.psi);
      point.mle_iterations = mle.iterations;
      point.mle_converged = mle.converged;
      rec.all_converged = rec.all_converged && mle.converged;
    }
    rec.superobserver_points.push_back(std::move(point));
  }
  return rec;
}

RunRecord run_gppt(const ExperimentConfig& config) {
  RunRecord rec = new_record(config);
  const paw::ClockParams clock = paw::ClockParams::make(config.omega);
  for (size_t i = 0; i < config.delta_B_values.size(); ++i) {
    const double delta_b = config.delta_B_values[i];
    const double tau = delta_b / config.omega;
    GpptPoint point;
    point.delta_B = delta_b;
    point.t_plus_tau_1 = clock.t1 + tau;
    point.t_plus_tau_2 = clock.t2 + tau;
    point.p3_t1 = gppt::two_time_conditional(1, tau, gppt::Route::Closed,
                                             gppt::kDefaultNodes, config.omega);
    point.p3_t2 = gppt::two_time_conditional(2, tau, gppt::Route::Closed,
                                             gppt::kDefaultNodes, config.omega);
    point.p3_t1_quad = gppt::two_time_conditional(1, tau, gppt::Route::Quadrature,
                                                  gppt::kDefaultNodes, config.omega);
    point.p3_t2_quad = gppt::two_time_conditional(2, tau, gppt::Route::Quadrature,
                                                  gppt::kDefaultNodes, config.omega);
    if (config.shots > 0) {
      optics_mc::ShotConfig shot_config;
      shot_config.n_shots = config.shots;
      shot_config.seed = rng::derive_seed(config.seed, static_cast<std::uint64_t>(i));
      shot_config.mode = optics_mc::Mode::Gppt;
      shot_config.plate_A_list = config.plate_A_values;
      shot_config.delta_B = delta_b;
      shot_config.omega = config.omega;
      point.estimates = optics_mc::estimate_conditionals(optics_mc::sample_shots(shot_config));
    }
    rec.gppt_points.push_back(std::move(point));
  }
  return rec;
}

}  // namespace

RunRecord run(const ExperimentConfig& config) {
  validate(config);
  switch (config.mode) {
    case Mode::PawObserver: return run_paw_observer(config);
    case Mode::PawSuperobserver: return run_paw_superobserver(config);
    case Mode::Gppt: return run_gppt(config);
  }
  throw ConfigError("unknown mode");
}

// ---------------------------------------------------------------------------
// Formatting

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

std::string cell(const std::optional<double>& value) {
  return value ? format_double(*value) : std::string("undefined");
}

void append_estimate_cells(std::string& row, const optics_mc::EstimatedConditional& e) {
  row += ',';
  row += cell(e.p_hat);
  row += ',';
  row += format_double(e.stderr_value);
}

}  // namespace

std::string to_csv(const RunRecord& record) {
  std::string out;
  const ExperimentConfig& config = record.config;
  switch (config.mode) {
    case Mode::PawObserver: {
      out = "plate_A_rad,P3g1,P3g2,P4g1,P4g2";
      if (config.shots > 0)
        out += ",P3g1_hat,P3g1_err,P3g2_hat,P3g2_err,P4g1_hat,P4g1_err,P4g2_hat,P4g2_err";
      out += '\n';
      for (const ObserverPoint& p : record.observer_points) {
        out += format_double(p.plate_A);
        out += ',';
        out += cell(p.analytic.p31);
        out += ',';
        out += cell(p.analytic.p32);
        out += ',';
        out += cell(p.analytic.p41);
        out += ',';
        out += cell(p.analytic.p42);
        if (p.estimates) {
          append_estimate_cells(out, p.estimates->p3g1);
          append_estimate_cells(out, p.estimates->p3g2);
          append_estimate_cells(out, p.estimates->p4g1);
          append_estimate_cells(out, p.estimates->p4g2);
        }
        out += '\n';
      }
      break;
    }
    case Mode::PawSuperobserver: {
      out = "plate_A_rad,fidelity_exact,postselect_prob";
      if (config.exposure > 0) out += ",fidelity_mle,mle_iterations";
      out += '\n';
      for (const SuperobserverPoint& p : record.superobserver_points) {
        out += format_double(p.plate_A);
        out += ',';
        out += format_double(p.fidelity_exact);
        out += ',';
        out += format_double(p.postselect_prob);
        if (config.exposure > 0) {
          out += ',';
          out += cell(p.fidelity_mle);
          out += ',';
          out += p.mle_iterations ? std::to_string(*p.mle_iterations) : std::string("undefined");
        }
        out += '\n';
      }
      break;
    }
    case Mode::Gppt: {
      out = "delta_B_rad,t_plus_tau_1,p3_t1,t_plus_tau_2,p3_t2,p3_t1_quad,p3_t2_quad";
      if (config.shots > 0) out += ",p3_t1_hat,p3_t1_err,p3_t2_hat,p3_t2_err";
      out += '\n';
      for (const GpptPoint& p : record.gppt_points) {
        out += format_double(p.delta_B);
        out += ',';
        out += format_double(p.t_plus_tau_1);
        out += ',';
        out += format_double(p.p3_t1);
        out += ',';
        out += format_double(p.t_plus_tau_2);
        out += ',';
        out += format_double(p.p3_t2);
        out += ',';
        out += format_double(p.p3_t1_quad);
        out += ',';
        out += format_double(p.p3_t2_quad);
        if (p.estimates) {
          append_estimate_cells(out, p.estimates->p3g1);
          append_estimate_cells(out, p.estimates->p3g2);
        }
        out += '\n';
      }
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON record

namespace {

json conditional_table_to_json(const paw::ConditionalTable& t) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  return json{{"P3g1", opt(t.p31)}, {"P3g2", opt(t.p32)}, {"P4g1", opt(t.p41)},
              {"P4g2", opt(t.p42)}, {"denom1", t.denom1}, {"denom2", t.denom2}};
}

paw::ConditionalTable conditional_table_from_json(const json& j) {
  paw::ConditionalTable t;
  auto opt = [&](const char* key) -> std::optional<double> {
    if (j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
  };
  t.p31 = opt("P3g1");
  t.p32 = opt("P3g2");
  t.p41 = opt("P4g1");
  t.p42 = opt("P4g2");
  t.denom1 = j.at("denom1").get<double>();
  t.denom2 = j.at("denom2").get<double>();
  return t;
}

json estimate_to_json(const optics_mc::EstimatedConditional& e) {
  return json{{"p_hat", e.p_hat ? json(*e.p_hat) : json(nullptr)},
              {"stderr", e.stderr_value},
              {"num", e.numerator},
              {"den", e.denominator}};
}

optics_mc::EstimatedConditional estimate_from_json(const json& j) {
  optics_mc::EstimatedConditional e;
  if (!j.at("p_hat").is_null()) e.p_hat = j.at("p_hat").get<double>();
  e.stderr_value = j.at("stderr").get<double>();
  e.numerator = j.at("num").get<long long>();
  e.denominator = j.at("den").get<long long>();
  return e;
}

json estimates_to_json(const optics_mc::ConditionalEstimates& e) {
  return json{{"p3g1", estimate_to_json(e.p3g1)},
              {"p3g2", estimate_to_json(e.p3g2)},
              {"p4g1", estimate_to_json(e.p4g1)},
              {"p4g2", estimate_to_json(e.p4g2)}};
}

optics_mc::ConditionalEstimates estimates_from_json(const json& j) {
  optics_mc::ConditionalEstimates e;
  e.p3g1 = estimate_from_json(j.at("p3g1"));
  e.p3g2 = estimate_from_json(j.at("p3g2"));
  e.p4g1 = estimate_from_json(j.at("p4g1"));
  e.p4g2 = estimate_from_json(j.at("p4g2"));
  return e;
}

json config_to_json(const ExperimentConfig& c) {
  return json{{"mode", to_string(c.mode)},
              {"omega", c.omega},
              {"plate_A_values", c.plate_A_values},
              {"delta_B_values", c.delta_B_values},
              {"shots", c.shots},
              {"exposure", c.exposure},
              {"seed", c.seed},
              {"output_path", c.output_path},
              {"format", c.format},
              {"timestamp", c.timestamp},
              {"tomography_dump_dir", c.tomography_dump_dir}};
}

}  // namespace

std::string to_json_text(const RunRecord& record) {
  json points = json::array();
  json inset(nullptr);
  switch (record.config.mode) {
    case Mode::PawObserver:
      for (const ObserverPoint& p : record.observer_points) {
        json jp{{"plate_A_rad", p.plate_A}, {"analytic", conditional_table_to_json(p.analytic)}};
        jp["estimates"] = p.estimates ? estimates_to_json(*p.estimates) : json(nullptr);
        points.push_back(std::move(jp));
      }
      if (record.inset) {
        inset = json{{"t1", record.inset->t1},
                     {"t2", record.inset->t2},
                     {"analytic", conditional_table_to_json(record.inset->analytic)},
                     {"estimates", record.inset->estimates
                                       ? estimates_to_json(*record.inset->estimates)
                                       : json(nullptr)}};
      }
      break;
    case Mode::PawSuperobserver:
      for (const SuperobserverPoint& p : record.superobserver_points) {
        points.push_back(json{{"plate_A_rad", p.plate_A},
                              {"fidelity_exact", p.fidelity_exact},
                              {"postselect_prob", p.postselect_prob},
                              {"fidelity_mle", p.fidelity_mle ? json(*p.fidelity_mle) : json(nullptr)},
                              {"mle_iterations",
                               p.mle_iterations ? json(*p.mle_iterations) : json(nullptr)},
                              {"mle_converged", p.mle_converged}});
      }
      break;
    case Mode::Gppt:
      for (const GpptPoint& p : record.gppt_points) {
        json jp{{"delta_B_rad", p.delta_B},
                {"t_plus_tau_1", p.t_plus_tau_1},
                {"p3_t1", p.p3_t1},
                {"t_plus_tau_2", p.t_plus_tau_2},
                {"p3_t2", p.p3_t2},
                {"p3_t1_quad", p.p3_t1_quad},
                {"p3_t2_quad", p.p3_t2_quad}};
        jp["estimates"] = p.estimates ? estimates_to_json(*p.estimates) : json(nullptr);
        points.push_back(std::move(jp));
      }
      break;
  }
  const json doc{{"config", config_to_json(record.config)},
                 {"versions", {{"tool", record.tool_version}, {"format", record.format_version}}},
                 {"timestamp", record.timestamp},
                 {"all_converged", record.all_converged},
                 {"results", {{"points", points}, {"inset", inset}}}};
  return doc.dump(2) + "\n";
}

RunRecord record_from_json_text(const std::string& text) {
  const json doc = json::parse(text);
  RunRecord rec;
  const json& jc = doc.at("config");
  const std::optional<Mode> mode = mode_from_string(jc.at("mode").get<std::string>());
  if (!mode) throw ConfigError("record has unknown mode");
  rec.config.mode = *mode;
  rec.config.omega = jc.at("omega").get<double>();
  rec.config.plate_A_values = jc.at("plate_A_values").get<std::vector<double>>();
  rec.config.delta_B_values = jc.at("delta_B_values").get<std::vector<double>>();
  rec.config.shots = jc.at("shots").get<long long>();
  rec.config.exposure = jc.at("exposure").get<long long>();
  rec.config.seed = jc.at("seed").get<std::uint64_t>();
  rec.config.output_path = jc.at("output_path").get<std::string>();
  rec.config.format = jc.at("format").get<std::string>();
  rec.config.timestamp = jc.at("timestamp").get<std::string>();
  rec.config.tomography_dump_dir = jc.at("tomography_dump_dir").get<std::string>();
  rec.tool_version = doc.at("versions").at("tool").get<std::string>();
  rec.format_version = doc.at("versions").at("format").get<std::string>();
  rec.timestamp = doc.at("timestamp").get<std::string>();
  rec.all_converged = doc.at("all_converged").get<bool>();
  const json& points = doc.at("results").at("points");
  switch (rec.config.mode) {
    case Mode::PawObserver:
      for (const json& jp : points) {
        ObserverPoint p;
        p.plate_A = jp.at("plate_A_rad").get<double>();
        p.analytic = conditional_table_from_json(jp.at("analytic"));
        if (!jp.at("estimates").is_null()) p.estimates = estimates_from_json(jp.at("estimates"));
        rec.observer_points.push_back(std::move(p));
      }
      if (!doc.at("results").at("inset").is_null()) {
        const json& ji = doc.at("results").at("inset");
        ObserverInset inset;
        inset.t1 = ji.at("t1").get<double>();
        inset.t2 = ji.at("t2").get<double>();
        inset.analytic = conditional_table_from_json(ji.at("analytic"));
        if (!ji.at("estimates").is_null()) inset.estimates = estimates_from_json(ji.at("estimates"));
        rec.inset = std::move(inset);
      }
      break;
    case Mode::PawSuperobserver:
      for (const json& jp : points) {
        SuperobserverPoint p;
        p.plate_A = jp.at("plate_A_rad").get<double>();
        p.fidelity_exact = jp.at("fidelity_exact").get<double>();
        p.postselect_prob = jp.at("postselect_prob").get<double>();
        if (!jp.at("fidelity_mle").is_null()) p.fidelity_mle = jp.at("fidelity_mle").get<double>();
        if (!jp.at("mle_iterations").is_null())
          p.mle_iterations = jp.at("mle_iterations").get<long long>();
        p.mle_converged = jp.at("mle_converged").get<bool>();
        rec.superobserver_points.push_back(std::move(p));
      }
      break;
    case Mode::Gppt:
      for (const json& jp : points) {
        GpptPoint p;
        p.delta_B = jp.at("delta_B_rad").get<double>();
        p.t_plus_tau_1 = jp.at("t_plus_tau_1").get<double>();
        p.p3_t1 = jp.at("p3_t1").get<double>();
        p.t_plus_tau_2 = jp.at("t_plus_tau_2").get<double>();
        p.p3_t2 = jp.at("p3_t2").get<double>();
        p.p3_t1_quad = jp.at("p3_t1_quad").get<double>();
        p.p3_t2_quad = jp.at("p3_t2_quad").get<double>();
        if (!jp.at("estimates").is_null()) p.estimates = estimates_from_json(jp.at("estimates"));
        rec.gppt_points.push_back(std::move(p));
      }
      break;
  }
  return rec;
}

// ---------------------------------------------------------------------------
// Record equality

namespace {

bool equal(const std::optional<double>& a, const std::optional<double>& b) {
  if (a.has_value() != b.has_value()) return false;
  return !a || *a == *b;
}

bool equal(const optics_mc::EstimatedConditional& a, const optics_mc::EstimatedConditional& b) {
  return equal(a.p_hat, b.p_hat) && a.stderr_value == b.stderr_value &&
         a.numerator == b.numerator && a.denominator == b.denominator;
}

bool equal(const std::optional<optics_mc::ConditionalEstimates>& a,
           const std::optional<optics_mc::ConditionalEstimates>& b) {
  if (a.has_value() != b.has_value()) return false;
  if (!a) return true;
  return equal(a->p3g1, b->p3g1) && equal(a->p3g2, b->p3g2) && equal(a->p4g1, b->p4g1) &&
         equal(a->p4g2, b->p4g2);
}

bool equal(const paw::ConditionalTable& a, const paw::ConditionalTable& b) {
  return equal(a.p31, b.p31) && equal(a.p32, b.p32) && equal(a.p41, b.p41) &&
         equal(a.p42, b.p42) && a.denom1 == b.denom1 && a.denom2 == b.denom2;
}

}  // namespace

bool operator==(const RunRecord& a, const RunRecord& b) {
  if (!(a.config == b.config)) return false;
  if (a.tool_version != b.tool_version || a.format_version != b.format_version ||
      a.timestamp != b.timestamp || a.all_converged != b.all_converged)
    return false;
  if (a.observer_points.size() != b.observer_points.size() ||
      a.superobserver_points.size() != b.superobserver_points.size() ||
      a.gppt_points.size() != b.gppt_points.size())
    return false;
  for (size_t i = 0; i < a.observer_points.size(); ++i) {
    const ObserverPoint& x = a.observer_points[i];
    const ObserverPoint& y = b.observer_points[i];
    if (x.plate_A != y.plate_A || !equal(x.analytic, y.analytic) || !equal(x.estimates, y.estimates))
      return false;
  }
  if (a.inset.has_value() != b.inset.has_value()) return false;
  if (a.inset) {
    if (a.inset->t1 != b.inset->t1 || a.inset->t2 != b.inset->t2 ||
        !equal(a.inset->analytic, b.inset->analytic) ||
        !equal(a.inset->estimates, b.inset->estimates))
      return false;
  }
  for (size_t i = 0; i < a.superobserver_points.size(); ++i) {
    const SuperobserverPoint& x = a.superobserver_points[i];
    const SuperobserverPoint& y = b.superobserver_points[i];
    if (x.plate_A != y.plate_A || x.fidelity_exact != y.fidelity_exact ||
        x.postselect_prob != y.postselect_prob || !equal(x.fidelity_mle, y.fidelity_mle) ||
        x.mle_iterations != y.mle_iterations || x.mle_converged != y.mle_converged)
      return false;
  }
  for (size_t i = 0; i < a.gppt_points.size(); ++i) {
    const GpptPoint& x = a.gppt_points[i];
    const GpptPoint& y = b.gppt_points[i];
    if (x.delta_B != y.delta_B || x.t_plus_tau_1 != y.t_plus_tau_1 || x.p3_t1 != y.p3_t1 ||
        x.t_plus_tau_2 != y.t_plus_tau_2 || x.p3_t2 != y.p3_t2 ||
        x.p3_t1_quad != y.p3_t1_quad || x.p3_t2_quad != y.p3_t2_quad ||
        !equal(x.estimates, y.estimates))
      return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Tomography data CSV

std::string tomography_data_to_csv(const tomography::TomographyData& data) {
  std::string out = "setting_index,label,qwp_c_rad,hwp_c_rad,qwp_r_rad,hwp_r_rad,count,exposure,model\n";
  const char* model = data.model == tomography::CountModel::Binomial ? "binomial" : "poisson";
  for (size_t i = 0; i < data.settings.size(); ++i) {
    const tomography::ProjectionSetting& s = data.settings[i];
    out += std::to_string(i);
    out += ',';
    out += s.label;
    out += ',';
    out += format_double(s.qwp_c);
    out += ',';
    out += format_double(s.hwp_c);
    out += ',';
    out += format_double(s.qwp_r);
    out += ',';
    out += format_double(s.hwp_r);
    out += ',';
    out += std::to_string(data.counts[i]);
    out += ',';
    out += std::to_string(data.exposure);
    out += ',';
    out += model;
    out += '\n';
  }
  return out;
}

tomography::TomographyData tomography_data_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("tomography CSV: empty input");
  tomography::TomographyData data;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() != 9) throw std::runtime_error("tomography CSV: malformed row");
    tomography::ProjectionSetting s;
    s.label = fields[1];
    s.qwp_c = std::stod(fields[2]);
    s.hwp_c = std::stod(fields[3]);
    s.qwp_r = std::stod(fields[4]);
    s.hwp_r = std::stod(fields[5]);
    data.settings.push_back(std::move(s));
    data.counts.push_back(std::stoll(fields[6]));
    data.exposure = std::stoll(fields[7]);
    data.model = fields[8] == "poisson" ? tomography::CountModel::Poisson
                                        : tomography::CountModel::Binomial;
  }
  return data;
}

// ---------------------------------------------------------------------------
// Files and summary

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string summarize(const RunRecord& record) {
  std::ostringstream out;
  out << to_string(record.config.mode) << ": ";
  switch (record.config.mode) {
    case Mode::PawObserver:
      out << record.observer_points.size() << " plate settings";
      if (record.inset && record.inset->analytic.p31)
        out << ", p(V at t1) = " << format_double(*record.inset->analytic.p31)
            << ", p(V at t2) = " << format_double(record.inset->analytic.p32.value_or(0.0));
      break;
    case Mode::PawSuperobserver: {
      double fmin = 1.0, fmax = 0.0;
      for (const SuperobserverPoint& p : record.superobserver_points) {
        fmin = std::min(fmin, p.fidelity_exact);
        fmax = std::max(fmax, p.fidelity_exact);
      }
      out << record.superobserver_points.size() << " plate settings, exact fidelity in ["
          << format_double(fmin) << ", " << format_double(fmax) << "]";
      break;
    }
    case Mode::Gppt: {
      out << record.gppt_points.size() << " delays";
      break;
    }
  }
  return out.str();
}

}  // namespace relclock::harness
