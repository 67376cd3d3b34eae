#pragma once

// Text formats: probe observation files and allocation CSV. Grammars are in
// docs/formats.md.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

#include "hputune/allocator.hpp"
#include "hputune/market.hpp"
#include "hputune/simulator.hpp"

namespace hputune {

/// Six significant digits, as every CSV and report column is printed.
std::string format_number(double value);

ProbeObservation read_probe(std::istream& in, const std::string& source = "probe");
ProbeObservation load_probe(const std::filesystem::path& path);
void write_probe(std::ostream& out, const ProbeObservation& obs);

inline constexpr std::string_view kAllocationSchema = "# hputune-allocation v1";
inline constexpr std::string_view kSimulationSchema = "# hputune-simulation v1";

void write_allocation(std::ostream& out, const PaymentPlan& plan, std::span<const TaskGroup> groups);

/// Group ids must match `groups`; task and repetition indices must be dense.
PaymentPlan read_allocation(std::istream& in, std::span<const TaskGroup> groups,
                            const std::string& source = "allocation");

void write_simulation(std::ostream& out, const SimulationStats& stats,
                      std::span<const TaskGroup> groups);

}  // namespace hputune
