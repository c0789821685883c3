#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "lapwave/consensus.hpp"
#include "lapwave/distsim.hpp"
#include "lapwave/graph.hpp"
#include "lapwave/integrate.hpp"
#include "lapwave/spectral.hpp"

// Plot-data emission. CSV carries dense series, JSON carries summaries.
// Doubles print with 17 significant digits (round-trip exact), so identical
// runs produce byte-identical files.

namespace lapwave {

std::string format_double(double v);

// "theta,node,re,im", bins 0..N/2, bin-major, nodes labeled via g.
// probe < 0 exports every recorded node.
std::string spectrum_csv(const SpectrumEstimate& spec, const Graph& g, int probe = -1);

// "time,node,re,im", sample-major.
std::string trajectory_csv(const Trajectory& traj, const Graph& g);

// [{"lambda": .., "theta": .., "bin": .., "vector": [..]}]
nlohmann::ordered_json eigenpairs_json(const std::vector<EigenPairEstimate>& pairs,
                                       bool include_vectors);

// {"rounds": [{"iter", "packets", "barriers"}...], "totals": {...}}
nlohmann::ordered_json distsim_stats_json(const distsim::SimResult& res);

// {"w", "steps_to_converge", "final_error", ...}
nlohmann::ordered_json consensus_json(const ConsensusRun& run);

nlohmann::ordered_json params_json(const Graph& g, const ChosenParams& params,
                                   double lambda_diff, double safety);

void write_text_file(const std::filesystem::path& path, const std::string& content);

} // namespace lapwave
