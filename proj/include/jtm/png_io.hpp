#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "jtm/rasterizer.hpp"

namespace jtm {

/// 8-bit RGB PNG, no alpha, no timestamp or text chunks, fixed zlib settings:
/// identical canvases always encode to identical bytes.
std::vector<std::uint8_t> encode_png(const JtmCanvas& canvas);

/// Decodes an 8-bit RGB PNG into a canvas (plane defaults to front).
JtmCanvas decode_png(std::span<const std::uint8_t> bytes);

/// Writes via a temporary file and rename. Throws Error(kIo).
void write_png(const JtmCanvas& canvas, const std::string& path);
JtmCanvas read_png(const std::string& path);

/// Writes `data` to `path` through a sibling temporary file and an atomic rename.
void write_file_atomic(const std::string& path, std::span<const std::uint8_t> data);
void write_file_atomic(const std::string& path, const std::string& text);
std::vector<std::uint8_t> read_file_bytes(const std::string& path);

}  // namespace jtm
