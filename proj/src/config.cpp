#include "iceline/config.hpp"

#include <json.hpp>

#include <map>

#include "iceline/errors.hpp"

namespace iceline::config {

namespace {

using nlohmann::json;

std::map<std::string, double*> param_fields(RunConfig& cfg) {
  if (cfg.model == "budyko") {
    auto& p = cfg.budyko_params;
    return {{"Q", &p.Q},           {"s2", &p.s2},
            {"B", &p.B},           {"C", &p.C},
            {"alpha1", &p.alpha1}, {"alpha2", &p.alpha2},
            {"Tc", &p.Tc},         {"rho", &p.rho},
            {"delta", &p.delta},   {"eta_c", &p.eta_c}};
  }
  auto& p = cfg.jormungand_params;
  return {{"Q", &p.Q},           {"s2", &p.s2},
          {"B", &p.B},           {"C", &p.C},
          {"rho", &p.rho},       {"delta", &p.delta},
          {"eta_c", &p.eta_c},   {"Tc", &p.Tc},
          {"M", &p.M},           {"alpha_w", &p.alpha_w},
          {"alpha_i", &p.alpha_i}, {"alpha_s", &p.alpha_s},
          {"y_snow", &p.y_snow}};
}

std::map<std::string, double*> integrator_fields(RunConfig& cfg) {
  auto& i = cfg.integrator;
  return {{"rel_tol", &i.rel_tol},
          {"abs_tol", &i.abs_tol},
          {"boundary_tol", &i.boundary_tol},
          {"tangency_tol", &i.tangency_tol},
          {"max_step", &i.max_step},
          {"max_slide_time", &i.max_slide_time}};
}

double number_at(const json& j, const std::string& where) {
  if (!j.is_number())
    throw PreconditionError("config: value of '" + where + "' must be a number");
  return j.get<double>();
}

}  // namespace

void set_param(RunConfig& cfg, const std::string& key, double value) {
  auto fields = param_fields(cfg);
  const auto it = fields.find(key);
  if (it == fields.end())
    throw PreconditionError("config: unknown parameter '" + key +
                            "' for model " + cfg.model);
  *it->second = value;
}

void set_integrator(RunConfig& cfg, const std::string& key, double value) {
  auto fields = integrator_fields(cfg);
  const auto it = fields.find(key);
  if (it == fields.end())
    throw PreconditionError("config: unknown integrator field '" + key + "'");
  *it->second = value;
}

RunConfig load_config(const std::string& json_text,
                      const std::optional<std::string>& model_override) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object())
    throw PreconditionError("config: document must be a JSON object");

  RunConfig cfg;

  // Model first: parameter-key validation depends on it.
  if (j.contains("model")) {
    if (!j["model"].is_string())
      throw PreconditionError("config: 'model' must be a string");
    cfg.model = j["model"].get<std::string>();
  }
  if (model_override) cfg.model = *model_override;
  if (cfg.model != "budyko" && cfg.model != "jormungand")
    throw PreconditionError("config: model must be 'budyko' or 'jormungand'");

  for (const auto& [key, value] : j.items()) {
    if (key == "model") {
      continue;
    } else if (key == "params") {
      if (!value.is_object())
        throw PreconditionError("config: 'params' must be an object");
      for (const auto& [pk, pv] : value.items())
        set_param(cfg, pk, number_at(pv, "params." + pk));
    } else if (key == "integrator") {
      if (!value.is_object())
        throw PreconditionError("config: 'integrator' must be an object");
      for (const auto& [ik, iv] : value.items())
        set_integrator(cfg, ik, number_at(iv, "integrator." + ik));
    } else if (key == "ic") {
      if (!value.is_object())
        throw PreconditionError("config: 'ic' must be an object");
      for (const auto& [ck, cv] : value.items()) {
        if (ck == "A")
          cfg.ic_A = number_at(cv, "ic.A");
        else if (ck == "eta")
          cfg.ic_eta = number_at(cv, "ic.eta");
        else
          throw PreconditionError("config: unknown key 'ic." + ck + "'");
      }
    } else if (key == "t_max") {
      cfg.t_max = number_at(value, "t_max");
    } else if (key == "dt_out") {
      cfg.dt_out = number_at(value, "dt_out");
    } else if (key == "seed") {
      if (!value.is_number_integer())
        throw PreconditionError("config: 'seed' must be an integer");
      cfg.seed = value.get<long long>();
    } else {
      throw PreconditionError("config: unknown key '" + key + "'");
    }
  }
  return cfg;
}

std::string canonical_json(const RunConfig& cfg) {
  RunConfig tmp = cfg;  // param_fields needs mutable access
  json params;
  for (const auto& [key, ptr] : param_fields(tmp)) params[key] = *ptr;
  json integrator;
  for (const auto& [key, ptr] : integrator_fields(tmp)) integrator[key] = *ptr;

  json j;
  j["model"] = cfg.model;
  j["params"] = params;
  j["integrator"] = integrator;
  j["ic"] = {{"A", cfg.ic_A}, {"eta", cfg.ic_eta}};
  j["t_max"] = cfg.t_max;
  j["dt_out"] = cfg.dt_out;
  if (cfg.seed) j["seed"] = *cfg.seed;
  return j.dump(2) + "\n";
}

IceLineModel make_model(const RunConfig& cfg) {
  if (cfg.model == "jormungand")
    return jormungand::make_model(cfg.jormungand_params);
  return budyko::make_model(cfg.budyko_params);
}

}  // namespace iceline::config
