#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "funcest/causal.hpp"
#include "funcest/density.hpp"
#include "funcest/harness.hpp"
#include "funcest/lower_bounds.hpp"

namespace funcest {

/// Shortest round-trip decimal text for a double.
std::string format_double(double v);

/// Parses the JSON experiment schema. Throws ConfigError.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

void write_risk_csv(std::ostream& os, const RiskReport& report);
/// construction, params, separation, claimed_separation, divergence_kind,
/// divergence, budget, pass. params is a ';'-joined list of name=value.
void write_lb_csv_header(std::ostream& os);
void write_lb_csv_row(std::ostream& os, const LBInstance& inst);

/// Every number in a comma/whitespace separated file, in order.
std::vector<double> read_numbers(const std::string& path);
/// Density file: N followed by N cell heights.
PiecewiseDensity read_density(const std::string& path, double sup_bound = PiecewiseDensity::kDefaultSupBound);
void write_density(std::ostream& os, const PiecewiseDensity& f);
/// Three columns x,a,y per row; an optional header line is skipped.
std::vector<Observation> read_causal_sample(const std::string& path);
void write_causal_sample(std::ostream& os, const std::vector<Observation>& obs);
/// Two columns pi_hat,mu_hat per cell.
NuisancePilots read_pilots(const std::string& path, double margin = CausalModel::kDefaultMargin);

}  // namespace funcest
