#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include "liftdl/extractor/minic_ast.hpp"

namespace liftdl::extract {

/// Parses one translation unit and resolves every identifier against the
/// unit's declarations. Throws SourceError with line and column on syntax
/// errors and unresolved identifiers.
ast::Unit parse_mini_c(std::string_view text, const std::string& path);

/// Parses every `.c`, `.cc`, `.cpp`, `.h` and `.hpp` file below `root`,
/// ordered by relative path. Unit paths are relative to `root` with `/`
/// separators.
std::vector<ast::Unit> parse_source_tree(const std::filesystem::path& root);

}  // namespace liftdl::extract
