#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "dubinspair/solver.hpp"

namespace dubinspair {

/// Shortest round-trip decimal form of a double (std::to_chars).
std::string format_double(double value);

std::uint64_t fnv1a64(std::string_view bytes);

/// Per-node table: t,x1,x2,x3,y1,y2,y3,u1,u2,v1,v2,p1,p2,p3,p4,p5,p6,H,sep.
std::string trajectory_csv(const Solution& solution);

/// Key-value report: every SolveReport field plus tool version and the
/// scenario hash, in fixed order.
std::string summary_text(const Solution& solution, std::uint64_t scenario_hash);

/// Planar plot of both vehicle paths: equal-axis polylines with start and end
/// markers, self-contained SVG.
std::string trajectory_svg(const Solution& solution);

/// Writes bytes to path, creating parent directories; throws
/// std::runtime_error on I/O failure.
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace dubinspair
