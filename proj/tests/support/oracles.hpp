#pragma once

// Test-side reference computations. None of these call into the library
// under test; they work from raw edge lists and plain containers.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <tuple>
#include <vector>

namespace oracle {

using Triple = std::tuple<std::uint32_t, std::uint32_t, double>;

// Newman modularity straight from the dense symmetric matrix. A triple
// (a, b, w) adds w to A[a][b] and A[b][a]; a self-loop adds 2w to A[a][a].
double brute_modularity(std::size_t n, const std::vector<Triple>& triples, const std::vector<std::uint32_t>& labels,
                        double gamma = 1.0);

// Every set partition of {0..n-1} as restricted growth strings.
void for_each_partition(std::size_t n, const std::function<void(const std::vector<std::uint32_t>&)>& fn);

// Normalized mutual information, arithmetic-mean normalization.
double nmi(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b);

// Stochastic block model with unit weights; blocks are contiguous.
std::vector<Triple> planted_partition(std::size_t blocks, std::size_t block_size, double p_in, double p_out,
                                      std::uint64_t seed);

// Authority vector: dominant eigenvector of W^T W for W[src][dst] = weight,
// sign-fixed to be non-negative and unit length.
std::vector<double> authority_eigenvector(std::size_t n, const std::vector<Triple>& directed);

double cosine(const std::vector<double>& a, const std::vector<double>& b);

// Simple delimited reader (no quoting) used for fixture files.
std::vector<std::vector<std::string>> read_delimited(const std::filesystem::path& path, char sep,
                                                     bool skip_header = true);

std::string slurp(const std::filesystem::path& path);

}  // namespace oracle
