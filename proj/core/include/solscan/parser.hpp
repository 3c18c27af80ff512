#pragma once

#include "solscan/ir.hpp"
#include "solscan/source_file.hpp"

namespace solscan::ir {

/// Parses the supported Solidity subset. Statements outside the subset become
/// Unparsed nodes; only unbalanced delimiters or truncated input throw
/// solscan::ParseError.
[[nodiscard]] Node parse_source(const SourceFile& file);

}  // namespace solscan::ir
