#pragma once

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <thread>
#include <vector>

// Deterministic emission helpers shared by the curve commands.

namespace gmsc::io {

/// 17 significant digits, lowercase scientific.  Every numeric field in the
/// emitted files goes through this, so repeated runs are byte-identical.
inline std::string format_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

inline std::string json_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

/// Write-to-temp then rename, so a failed run never leaves a partial file
/// behind at the destination.
inline void write_atomic(const std::filesystem::path& path,
                         std::string_view content) {
  namespace fs = std::filesystem;
  const fs::path dir = path.parent_path();
  const fs::path tmp =
      (dir.empty() ? fs::path(".") : dir) /
      (path.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw std::runtime_error("write_atomic: cannot open " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("write_atomic: short write to " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ec2;
    fs::remove(tmp, ec2);
    throw std::filesystem::filesystem_error("write_atomic: rename failed", tmp,
                                            path, ec);
  }
}

inline std::vector<double> spaced_grid(double lo, double hi, int count,
                                       bool log_spacing) {
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  if (log_spacing) {
    const double llo = std::log(lo);
    const double step = (std::log(hi) - llo) / (count - 1);
    for (int i = 0; i < count; ++i) out[i] = std::exp(llo + i * step);
    out[count - 1] = hi;
  } else {
    const double step = (hi - lo) / (count - 1);
    for (int i = 0; i < count; ++i) out[i] = lo + i * step;
    out[count - 1] = hi;
  }
  return out;
}

/// Evaluate fn(0..n-1) across hardware threads.  Results land in index
/// order, so downstream emission is independent of scheduling; the first
/// exception thrown by any worker is rethrown to the caller.
template <typename F>
auto parallel_map(std::size_t n, F&& fn)
    -> std::vector<decltype(fn(std::size_t{}))> {
  using Result = decltype(fn(std::size_t{}));
  std::vector<Result> out(n);
  const unsigned hw = std::thread::hardware_concurrency();
  const std::size_t workers = std::min<std::size_t>(hw ? hw : 1, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      try {
        for (std::size_t i; (i = next.fetch_add(1)) < n && !failed;)
          out[i] = fn(i);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace gmsc::io
