#ifndef NCYCLE_BOX_IO_H
#define NCYCLE_BOX_IO_H

#include <filesystem>
#include <string>
#include <string_view>

#include "ncycle/box.h"

namespace ncycle {

// Box files are JSON documents:
//   {"n": 4, "d": 2, "label": "...", "edges": [[p00, p01, p10, p11], ...]}
// Doubles are written in shortest round-trip form, so parse(serialize(b)) == b bit for bit.

/// Throws DataError naming the offending field (or line/column for syntax errors).
Box parse_box(std::string_view text);
std::string serialize_box(const Box &box);

Box read_box_file(const std::filesystem::path &path);
/// Writes to a sibling temporary file and renames it into place.
void write_text_atomically(const std::filesystem::path &path, std::string_view contents);

}  // namespace ncycle

#endif
