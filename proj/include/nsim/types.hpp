#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace nsim {

/// Simulated time and durations, in whole seconds.
using Seconds = std::int64_t;

inline constexpr Seconds kMinute = 60;
inline constexpr Seconds kHour = 3600;
inline constexpr Seconds kDay = 86400;

enum class NodeId : std::uint32_t {};
enum class WingId : std::uint32_t {};
enum class LeafId : std::uint32_t {};

constexpr std::uint32_t index(NodeId n) { return static_cast<std::uint32_t>(n); }
constexpr std::uint32_t index(WingId w) { return static_cast<std::uint32_t>(w); }
constexpr std::uint32_t index(LeafId l) { return static_cast<std::uint32_t>(l); }

/// Sorted, duplicate-free list of nodes.
using NodeSet = std::vector<NodeId>;

using JobId = std::int64_t;

enum class FileSystem { home, scratch, project, bb, hpss };

std::string_view to_string(FileSystem fs);
/// Accepts names ("scratch") and the numeric codes 0..4.
bool parse_file_system(std::string_view text, FileSystem& out);

}  // namespace nsim
