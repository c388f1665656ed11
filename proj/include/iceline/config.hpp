#pragma once

#include <optional>
#include <string>

#include "iceline/budyko.hpp"
#include "iceline/jormungand.hpp"

namespace iceline::config {

// Effective configuration of a CLI run.  Holds parameter records for both
// models; `model` selects which one a command uses.
struct RunConfig {
  std::string model = "budyko";  // "budyko" or "jormungand"
  budyko::BudykoParams budyko_params;
  jormungand::JormungandParams jormungand_params;
  filippov::IntegratorConfig integrator;
  double ic_A = 200.0;
  double ic_eta = 0.5;
  double t_max = 1000.0;
  double dt_out = 1.0;
  std::optional<long long> seed;
};

// Strict JSON parse: any unknown key (at any level) raises PreconditionError,
// as does a parameter key that does not belong to the effective model.  When
// model_override is set it supersedes the document's "model" entry.
RunConfig load_config(const std::string& json_text,
                      const std::optional<std::string>& model_override = {});

// Canonical serialization (sorted keys, round-trippable numbers).  Parsing
// the result with load_config and serializing again is byte-identical.
std::string canonical_json(const RunConfig& cfg);

// Applies one parameter by field name ("eta_c", "Q", ...) to the effective
// model's record; unknown-for-model names raise PreconditionError.
void set_param(RunConfig& cfg, const std::string& key, double value);

// Applies one integrator field by name ("rel_tol", ...).
void set_integrator(RunConfig& cfg, const std::string& key, double value);

// Builds the selected model from the effective parameters.
IceLineModel make_model(const RunConfig& cfg);

}  // namespace iceline::config
