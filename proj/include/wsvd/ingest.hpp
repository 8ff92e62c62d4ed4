#ifndef WSVD_INGEST_HPP
#define WSVD_INGEST_HPP

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "wsvd/dataset.hpp"

namespace wsvd {

/// Supported rating-file layouts. Every variant is line-oriented with
/// columns (user, item, rating, optional timestamp); the timestamp is
/// ignored. The variant fixes the delimiter and the rating scale:
///
///   MovieLens100K   tab-separated, ratings in [1, 5]
///   MovieLensDelim  "::"-separated (the 1M/10M layout), ratings in [0.5, 5]
///   FilmTrust       space-separated, ratings in [0.5, 4]
///   Epinions        delimiter configurable (distributions vary; space by
///                   default, comma also common), ratings in [1, 5]
enum class DatasetFormat { MovieLens100K, MovieLensDelim, FilmTrust, Epinions };

const char* to_string(DatasetFormat fmt);
std::optional<DatasetFormat> dataset_format_from_string(const std::string& name);

struct ParseOptions {
    char epinions_delimiter = ' ';
};

/// Strict line parser: any malformed line (wrong column count, empty field,
/// bad number, rating outside the variant's scale) aborts with a ParseError
/// carrying the 1-based line number. Duplicate (user, item) pairs and empty
/// input are errors. Raw ids are remapped to dense indices in
/// first-appearance order.
RatingsDataset parse(std::istream& source, DatasetFormat fmt, const ParseOptions& opts = {});

/// parse() on a file path.
RatingsDataset parse_file(const std::string& path, DatasetFormat fmt,
                          const ParseOptions& opts = {});

/// Synthetic dataset with planted structure for scaling and equivalence
/// experiments: every user rates `ratings_per_user` distinct items, and
/// r = 3 + (w* ⊙ p_u)·q_j + noise, clamped to the 1-5 scale, with planted
/// factors drawn from the seed. `factor_weights` must have `planted_factors`
/// entries. Deterministic per seed.
RatingsDataset generate_synthetic(std::int32_t users, std::int32_t items,
                                  std::int32_t ratings_per_user, std::int32_t planted_factors,
                                  const std::vector<double>& factor_weights, double noise_sd,
                                  std::uint64_t seed);

} // namespace wsvd

#endif
