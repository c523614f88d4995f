#pragma once

// Shared helpers for the test suites.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "smudge/smudge.hpp"

namespace testsupport {

/// Single integer column named "x" (plus optional target column "y").
inline smudge::Dataset int_column(const std::vector<std::int64_t>& values) {
    smudge::Dataset ds;
    ds.schema.columns = {{"x", smudge::ColumnType{smudge::TypeKind::integer, {}}}};
    for (std::size_t i = 0; i < values.size(); ++i) {
        ds.rows.push_back({smudge::CellValue{values[i]}});
        ds.row_ids.push_back(static_cast<std::int64_t>(i));
    }
    return ds;
}

/// n rows of (x = i, y = i % 2) with y designated as target.
inline smudge::Dataset indexed_rows(std::size_t n) {
    smudge::Dataset ds;
    ds.schema.columns = {{"x", smudge::ColumnType{smudge::TypeKind::integer, {}}},
                         {"y", smudge::ColumnType{smudge::TypeKind::integer, {}}}};
    ds.schema.target = "y";
    for (std::size_t i = 0; i < n; ++i) {
        ds.rows.push_back({smudge::CellValue{static_cast<std::int64_t>(i)},
                           smudge::CellValue{static_cast<std::int64_t>(i % 2)}});
        ds.row_ids.push_back(static_cast<std::int64_t>(i));
    }
    return ds;
}

inline std::string temp_dir(const std::string& tag) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("smudge_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir.string();
}

inline std::size_t count_cell_diffs(const smudge::Dataset& a, const smudge::Dataset& b) {
    std::size_t diffs = 0;
    const std::size_t rows = std::min(a.n_rows(), b.n_rows());
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < a.n_cols(); ++c)
            if (a.rows[r][c] != b.rows[r][c]) ++diffs;
    return diffs;
}

} // namespace testsupport
