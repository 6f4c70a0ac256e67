#pragma once

#include "blochlab/band_structure.hpp"
#include "blochlab/initial_states.hpp"
#include "blochlab/observables.hpp"
#include "blochlab/oracle.hpp"
#include "blochlab/position_space.hpp"

#include <filesystem>
#include <string>

namespace blochlab::io {

// Band and state files are JSON documents tagged by a "format" field.
//
// blochlab.bands:
//   period, hbar, kinetic_coeff, cutoff, num_k, k_grid[num_k], analytic,
//   bands[] { index, energy[num_k], berry[num_k], berry_unreliable[] (indices),
//             near_crossing[] (indices), coefficients { re[], im[] } (num_k*(2*cutoff+1), row j) },
//   diagnostics { max_cutoff_shift, max_berry_residue, warnings[] }
//
// blochlab.state:
//   period, num_k, k_grid[num_k], tag { kind, width, center, raw_norm },
//   bands[] { index, re[num_k], im[num_k] }
//
// Doubles are written in shortest round-trip form, so reading a written file
// reproduces every value bit for bit.

std::string bands_to_json(const BandStructure& bands);
BandStructure bands_from_json(const std::string& text);
void write_bands(const std::filesystem::path& path, const BandStructure& bands);
BandStructure read_bands(const std::filesystem::path& path);

std::string state_to_json(const MomentumState& state);
MomentumState state_from_json(const std::string& text);
void write_state(const std::filesystem::path& path, const MomentumState& state);
MomentumState read_state(const std::filesystem::path& path);

/// Every OracleConfig field by name; missing keys keep their defaults.
std::string oracle_config_to_json(const OracleConfig& cfg);
OracleConfig oracle_config_from_json(const std::string& text);

/// Header tau,mean_k,dx,dS,sigma,chi; values in %.17g.
std::string trace_to_csv(const ObservableTrace& trace);
void write_trace_csv(const std::filesystem::path& path, const ObservableTrace& trace);

/// Header x,re,im,density; values in %.17g.
std::string packet_to_csv(const PositionWavepacket& packet);
void write_packet_csv(const std::filesystem::path& path, const PositionWavepacket& packet);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

} // namespace blochlab::io
