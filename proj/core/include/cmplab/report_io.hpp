#pragma once

#include <string>
#include <string_view>

#include "cmplab/experiments.hpp"

namespace cmplab {

/**
 * Experiment config document (JSON):
 *
 *   {
 *     "n": 2, "m": 2,
 *     "regime": {"type": "averaged"}
 *             | {"type": "discounted", "gamma": 0.9}
 *             | {"type": "finite", "horizon": 5, "gamma": 1.0},
 *     "v0": [0.5, 0.5],                   optional, default uniform
 *     "reward": "random-per-run" | [0.2, 0.8],
 *     "samples": 100000,
 *     "master_seed": 20240601,
 *     "tie_tolerance": 1e-9,              optional
 *     "workers": 1,                       optional
 *     "tie_thresholds": [1e-9, 1e-3],     optional
 *     "transport_samples": 10000,         optional
 *     "enumeration_cap": 1000000,         optional
 *     "acceptance": {...}                 optional, null disables a check
 *   }
 *
 * Throws FormatError on malformed input and std::invalid_argument on values
 * that parse but violate a constraint.
 */
ExperimentConfig config_from_json(std::string_view text);
/// Canonical form. workers is omitted: it never affects results.
std::string config_to_json(const ExperimentConfig& config);
/// FNV-1a 64 of the canonical config, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

std::string frequency_to_json(const FrequencyReport& report);
FrequencyReport frequency_from_json(std::string_view text);
std::string entropy_to_json(const EntropyReport& report);
EntropyReport entropy_from_json(std::string_view text);
std::string ties_to_json(const TieReport& report);
TieReport ties_from_json(std::string_view text);
std::string transport_to_json(const TransportReport& report);
TransportReport transport_from_json(std::string_view text);

/// Whole bundle including the config echo and acceptance results. Excludes
/// wall-clock time so that reruns are byte-identical.
std::string report_to_json(const ExperimentReport& report);
ExperimentReport report_from_json(std::string_view text);

/// CSV files start with a "# manifest=..." comment line; loaders skip lines
/// starting with '#'.
///   frequencies.csv: policy_index,actions,count,frequency
///   ties.csv:        threshold,tie_count
///   transport.csv:   pi_i,pi_j,samples,matrix_violations,value_violations,
///                    involution_violations,optimality_checked,
///                    optimality_violations,count_i_optimal,count_j_optimal,volume_z
std::string frequency_to_csv(const FrequencyReport& report, std::string_view header_comment);
FrequencyReport frequency_from_csv(std::string_view text, std::size_t states, std::size_t actions);
std::string ties_to_csv(const TieReport& report, std::string_view header_comment);
/// Restores thresholds and counts only.
TieReport ties_from_csv(std::string_view text);
std::string transport_to_csv(const TransportReport& report, std::string_view header_comment);
TransportReport transport_from_csv(std::string_view text);

}  // namespace cmplab
