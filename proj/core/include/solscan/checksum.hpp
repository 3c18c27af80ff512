#pragma once

#include <string>
#include <string_view>

namespace solscan {

/// Lower-case hex MD5 digest.
[[nodiscard]] std::string md5_hex(std::string_view bytes);

}  // namespace solscan
