#pragma once

#include <map>
#include <string>
#include <vector>

#include "ias/ias.hpp"
#include "ias/types.hpp"

namespace ias {

// All writers are atomic: content goes to a sibling temp file which is then
// renamed over the target.
void atomic_write(const std::string& path, const std::string& content);

void write_vector_csv(const std::string& path, const Vector& v);
Vector read_vector_csv(const std::string& path);

// Rectangular CSV, comma-delimited, no header.
Matrix read_matrix_csv(const std::string& path);

// Per-iteration trace: schema comment, header row, one row per iteration.
void write_trace_csv(const std::string& path,
                     const std::vector<IterationRecord>& trace);

// Per-iteration convexity bitmaps as 0/1 strings, one row per iteration.
void write_bitmap_csv(const std::string& path,
                      const std::vector<IterationRecord>& trace);

// key,value rows (values formatted %.17g for doubles).
void write_metrics_csv(const std::string& path,
                       const std::map<std::string, std::string>& metrics);
std::map<std::string, std::string> read_metrics_csv(const std::string& path);

// 16-bit binary PGM (P5, maxval 65535, big-endian samples), values scaled
// linearly from [lo, hi] unless lo == hi, in which case the image is flat.
void write_pgm16(const std::string& path, const Vector& image, Index rows,
                 Index cols, double lo, double hi);

std::string format_double(double v);

}  // namespace ias
