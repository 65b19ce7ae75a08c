#pragma once

#include <ostream>

#include "lot/cli/run_config.hpp"

namespace lot::cli {

void cmd_dist(const RunConfig& cfg, std::ostream& out);
void cmd_log(const RunConfig& cfg, std::ostream& out);
void cmd_exp(const RunConfig& cfg, std::ostream& out);
void cmd_geodesic(const RunConfig& cfg, std::ostream& out);
void cmd_pca(const RunConfig& cfg, std::ostream& out);
void cmd_shoot(const RunConfig& cfg, std::ostream& out);
void cmd_study_kappa(const RunConfig& cfg, std::ostream& out);
void cmd_study_refine(const RunConfig& cfg, std::ostream& out);
void cmd_study_convexity(const RunConfig& cfg, std::ostream& out);
void cmd_gen_data(const RunConfig& cfg, std::ostream& out);
void cmd_oracle_dirac(const RunConfig& cfg, std::ostream& out);
void cmd_oracle_exact(const RunConfig& cfg, std::ostream& out);

}  // namespace lot::cli
