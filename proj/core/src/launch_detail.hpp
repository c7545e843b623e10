#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "rosarch/launch.hpp"

namespace rosarch::detail_launch {

LaunchSpec parse_launch_xml(const std::string& repo_relative_path, std::string_view text,
                            const LaunchContext& ctx);

LaunchSpec parse_launch_py(const std::string& repo_relative_path, std::string_view text,
                           const LaunchContext& ctx);

std::string resolve_include_target(const std::string& raw, const std::string& including_path,
                                   const LaunchContext& ctx, std::vector<std::string>& warnings);

}  // namespace rosarch::detail_launch
