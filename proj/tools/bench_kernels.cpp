#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <vector>

#include "pbrs/kernels.hpp"

namespace {

using pbrs::kernels::ConstView;
using pbrs::kernels::Exec;
using pbrs::kernels::MutView;

double seconds_per_run(void (*body)(Exec, std::size_t), Exec exec, std::size_t len,
                       int runs) {
  body(exec, len);  // warm up tables and caches
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < runs; ++i) body(exec, len);
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  return elapsed.count() / runs;
}

std::vector<std::uint8_t>& scratch(std::size_t len, unsigned which) {
  static std::vector<std::uint8_t> bufs[4];
  auto& buf = bufs[which];
  if (buf.size() < len) {
    buf.resize(len);
    std::mt19937_64 rng(0x5eedULL + which);
    for (auto& b : buf) b = static_cast<std::uint8_t>(rng());
  }
  return buf;
}

void run_axpy(Exec exec, std::size_t len) {
  auto& src = scratch(len, 0);
  auto& dst = scratch(len, 1);
  pbrs::kernels::mul_axpy(0xB7, ConstView{src.data(), len, 1}, MutView{dst.data(), len, 1},
                          exec);
}

void run_matmul(Exec exec, std::size_t len) {
  constexpr int k = 10, r = 4;
  const std::size_t cols = len / k;
  auto& in = scratch(cols * k, 2);
  auto& out = scratch(cols * r, 3);
  pbrs::Matrix coeffs(r, k);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < k; ++j) coeffs.at(i, j) = static_cast<std::uint8_t>(1 + i * k + j);
  std::vector<ConstView> ins;
  std::vector<MutView> outs;
  for (int j = 0; j < k; ++j) ins.push_back({in.data() + cols * j, cols, 1});
  for (int i = 0; i < r; ++i) outs.push_back({out.data() + cols * i, cols, 1});
  pbrs::kernels::gf_matmul(coeffs, ins, outs, exec);
}

void report(const char* name, std::size_t bytes, double serial_s, double parallel_s) {
  const double mib = static_cast<double>(bytes) / (1024.0 * 1024.0);
  std::printf("%-10s %8.1f MiB   serial %8.1f MiB/s   parallel %8.1f MiB/s   speedup %.2fx\n",
              name, mib, mib / serial_s, mib / parallel_s, serial_s / parallel_s);
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t mib = 64;
  int runs = 5;
  if (argc > 1) mib = static_cast<std::size_t>(std::strtoull(argv[1], nullptr, 10));
  if (argc > 2) runs = std::atoi(argv[2]);
  if (mib == 0 || runs <= 0) {
    std::fprintf(stderr, "usage: bench-kernels [buffer-mib] [runs]\n");
    return 2;
  }
  const std::size_t len = mib * 1024 * 1024;

  report("mul_axpy", len, seconds_per_run(run_axpy, Exec::serial, len, runs),
         seconds_per_run(run_axpy, Exec::parallel, len, runs));
  report("gf_matmul", len, seconds_per_run(run_matmul, Exec::serial, len, runs),
         seconds_per_run(run_matmul, Exec::parallel, len, runs));
  return 0;
}
