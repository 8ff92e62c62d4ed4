#include "wsvd/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "wsvd/rng.hpp"

namespace wsvd {

const char* to_string(DatasetFormat fmt) {
    switch (fmt) {
    case DatasetFormat::MovieLens100K: return "ml-100k";
    case DatasetFormat::MovieLensDelim: return "ml-delim";
    case DatasetFormat::FilmTrust: return "filmtrust";
    case DatasetFormat::Epinions: return "epinions";
    }
    return "?";
}

std::optional<DatasetFormat> dataset_format_from_string(const std::string& name) {
    if (name == "ml-100k") return DatasetFormat::MovieLens100K;
    if (name == "ml-delim") return DatasetFormat::MovieLensDelim;
    if (name == "filmtrust") return DatasetFormat::FilmTrust;
    if (name == "epinions") return DatasetFormat::Epinions;
    return std::nullopt;
}

namespace {

struct FormatSpec {
    std::string delimiter; // one or two characters, split exactly
    RatingScale scale;
};

FormatSpec format_spec(DatasetFormat fmt, const ParseOptions& opts) {
    switch (fmt) {
    case DatasetFormat::MovieLens100K: return {"\t", {1.0, 5.0}};
    case DatasetFormat::MovieLensDelim: return {"::", {0.5, 5.0}};
    case DatasetFormat::FilmTrust: return {" ", {0.5, 4.0}};
    case DatasetFormat::Epinions: return {std::string(1, opts.epinions_delimiter), {1.0, 5.0}};
    }
    throw Error("parse: unknown dataset format");
}

std::vector<std::string_view> split_fields(std::string_view line, std::string_view delim) {
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (true) {
        const std::size_t hit = line.find(delim, pos);
        if (hit == std::string_view::npos) {
            fields.push_back(line.substr(pos));
            return fields;
        }
        fields.push_back(line.substr(pos, hit - pos));
        pos = hit + delim.size();
    }
}

double parse_rating(std::string_view field, std::size_t line_no) {
    double value = 0.0;
    const auto* begin = field.data();
    const auto* end = field.data() + field.size();
    const auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc() || res.ptr != end)
        throw ParseError("bad rating value '" + std::string(field) + "'", line_no);
    return value;
}

} // namespace

RatingsDataset parse(std::istream& source, DatasetFormat fmt, const ParseOptions& opts) {
    const FormatSpec spec = format_spec(fmt, opts);
    auto users = std::make_shared<IdMap>();
    auto items = std::make_shared<IdMap>();
    std::vector<Rating> ratings;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(source, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) throw ParseError("blank line", line_no);

        const auto fields = split_fields(line, spec.delimiter);
        if (fields.size() != 3 && fields.size() != 4)
            throw ParseError("expected 3 or 4 fields, got " + std::to_string(fields.size()),
                             line_no);
        if (fields[0].empty() || fields[1].empty())
            throw ParseError("empty id field", line_no);

        const double value = parse_rating(fields[2], line_no);
        if (!(value >= spec.scale.min && value <= spec.scale.max))
            throw ParseError("rating " + std::string(fields[2]) + " outside scale [" +
                                 std::to_string(spec.scale.min) + ", " +
                                 std::to_string(spec.scale.max) + "]",
                             line_no);

        Rating r;
        r.user = users->intern(std::string(fields[0]));
        r.item = items->intern(std::string(fields[1]));
        r.value = value;
        ratings.push_back(r);
    }

    if (ratings.empty()) throw Error("parse: no ratings in input");
    // The dataset constructor rejects duplicate (user, item) pairs.
    return RatingsDataset(std::move(ratings), std::move(users), std::move(items), spec.scale);
}

RatingsDataset parse_file(const std::string& path, DatasetFormat fmt, const ParseOptions& opts) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("parse: cannot open '" + path + "'");
    return parse(in, fmt, opts);
}

RatingsDataset generate_synthetic(std::int32_t users, std::int32_t items,
                                  std::int32_t ratings_per_user, std::int32_t planted_factors,
                                  const std::vector<double>& factor_weights, double noise_sd,
                                  std::uint64_t seed) {
    if (users < 1 || items < 1) throw Error("generate_synthetic: need at least one user and item");
    if (ratings_per_user < 1 || ratings_per_user > items)
        throw Error("generate_synthetic: ratings per user must lie in [1, items]");
    if (planted_factors < 0) throw Error("generate_synthetic: negative factor count");
    if (std::int32_t(factor_weights.size()) != planted_factors)
        throw Error("generate_synthetic: factor_weights size must equal planted_factors");
    if (noise_sd < 0.0) throw Error("generate_synthetic: negative noise");

    SeededRng rng(seed);
    const std::size_t k = std::size_t(planted_factors);
    // Per-component spread k^(-1/4) keeps the planted dot product at unit
    // variance regardless of the factor count.
    const double sd = k > 0 ? std::pow(double(planted_factors), -0.25) : 0.0;

    std::vector<double> user_factors(std::size_t(users) * k);
    for (double& v : user_factors) v = sd * rng.normal();
    std::vector<double> item_factors(std::size_t(items) * k);
    for (double& v : item_factors) v = sd * rng.normal();

    auto user_ids = std::make_shared<IdMap>();
    auto item_ids = std::make_shared<IdMap>();
    for (std::int32_t u = 0; u < users; ++u) user_ids->intern(std::to_string(u));
    for (std::int32_t j = 0; j < items; ++j) item_ids->intern(std::to_string(j));

    std::vector<Rating> ratings;
    ratings.reserve(std::size_t(users) * std::size_t(ratings_per_user));
    std::vector<std::int32_t> pool(static_cast<std::size_t>(items));
    std::vector<std::int32_t> chosen(static_cast<std::size_t>(ratings_per_user));

    for (std::int32_t u = 0; u < users; ++u) {
        for (std::int32_t j = 0; j < items; ++j) pool[std::size_t(j)] = j;
        for (std::int32_t i = 0; i < ratings_per_user; ++i) {
            const auto pick = i + std::int32_t(rng.below(std::uint64_t(items - i)));
            std::swap(pool[std::size_t(i)], pool[std::size_t(pick)]);
            chosen[std::size_t(i)] = pool[std::size_t(i)];
        }
        std::sort(chosen.begin(), chosen.end());

        for (std::int32_t j : chosen) {
            double value = 3.0;
            for (std::size_t g = 0; g < k; ++g)
                value += factor_weights[g] * (user_factors[std::size_t(u) * k + g] *
                                              item_factors[std::size_t(j) * k + g]);
            value += noise_sd * rng.normal();
            value = std::min(5.0, std::max(1.0, value));
            ratings.push_back(Rating{u, j, value});
        }
    }

    return RatingsDataset(std::move(ratings), std::move(user_ids), std::move(item_ids),
                          RatingScale{1.0, 5.0});
}

} // namespace wsvd
