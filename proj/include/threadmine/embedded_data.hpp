#pragma once

#include <optional>
#include <string_view>

namespace threadmine {

// Contents of data/<key>.txt compiled into the library, e.g. "lexicons/modals".
std::optional<std::string_view> embedded_data(std::string_view key);

}  // namespace threadmine
