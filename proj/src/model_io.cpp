#include "wsvd/model_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <vector>

#include "wsvd/eval.hpp" // format_double

namespace wsvd {

namespace {

using IoKind = ModelIoError::Kind;

constexpr const char* kMagic = "wsvd-model";
constexpr int kVersion = 1;

// Blocks in serialization order, present per kind.
std::vector<const std::vector<double>*> block_list(const ModelParams& p) {
    std::vector<const std::vector<double>*> blocks;
    if (p.has_biases()) {
        blocks.push_back(&p.user_bias);
        blocks.push_back(&p.item_bias);
    }
    if (p.has_weights()) blocks.push_back(&p.weights);
    if (p.has_factors()) {
        blocks.push_back(&p.user_factors);
        blocks.push_back(&p.item_factors);
    }
    if (p.has_implicit()) blocks.push_back(&p.implicit_factors);
    return blocks;
}

std::vector<std::vector<double>*> block_list(ModelParams& p) {
    std::vector<std::vector<double>*> blocks;
    if (p.has_biases()) {
        blocks.push_back(&p.user_bias);
        blocks.push_back(&p.item_bias);
    }
    if (p.has_weights()) blocks.push_back(&p.weights);
    if (p.has_factors()) {
        blocks.push_back(&p.user_factors);
        blocks.push_back(&p.item_factors);
    }
    if (p.has_implicit()) blocks.push_back(&p.implicit_factors);
    return blocks;
}

void write_le_double(std::ostream& out, double value) {
    const auto bits = std::bit_cast<std::uint64_t>(value);
    char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = char((bits >> (8 * i)) & 0xff);
    out.write(bytes, 8);
}

double read_le_double(std::istream& in) {
    char bytes[8];
    in.read(bytes, 8);
    if (in.gcount() != 8) throw ModelIoError(IoKind::Corrupt, "model file: truncated payload");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= std::uint64_t(std::uint8_t(bytes[i])) << (8 * i);
    return std::bit_cast<double>(bits);
}

std::int64_t parse_int_field(const std::string& line, const std::string& key) {
    std::istringstream ss(line);
    std::string name, value, extra;
    if (!(ss >> name >> value) || name != key || (ss >> extra))
        throw ModelIoError(IoKind::Corrupt, "model file: expected '" + key + " <value>'");
    std::int64_t parsed = 0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), parsed);
    if (res.ec != std::errc() || res.ptr != value.data() + value.size())
        throw ModelIoError(IoKind::Corrupt, "model file: bad integer in '" + key + "' field");
    return parsed;
}

std::string next_header_line(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw ModelIoError(IoKind::Corrupt, "model file: unexpected end of header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

} // namespace

void save_model(const ModelParams& params, const std::string& path, ModelEncoding encoding) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ModelIoError(IoKind::Io, "cannot open '" + path + "' for writing");

    out << kMagic << ' ' << kVersion << ' '
        << (encoding == ModelEncoding::Binary ? "binary" : "text") << '\n'
        << "kind " << to_string(params.kind) << '\n'
        << "m " << params.m << '\n'
        << "n " << params.n << '\n'
        << "k " << params.k << '\n'
        << "end\n";

    if (encoding == ModelEncoding::Binary) {
        if (params.has_mean()) write_le_double(out, params.mean);
        for (const auto* block : block_list(params))
            for (double v : *block) write_le_double(out, v);
    } else {
        if (params.has_mean()) out << format_double(params.mean) << '\n';
        for (const auto* block : block_list(params)) {
            // Matrices get one row per line; vectors one value per line.
            const std::size_t stride =
                (params.k > 0 && block->size() % std::size_t(params.k) == 0 && !block->empty())
                    ? std::size_t(params.k)
                    : 1;
            for (std::size_t i = 0; i < block->size(); ++i) {
                out << format_double((*block)[i]);
                out << ((i % stride == stride - 1) ? '\n' : ' ');
            }
        }
    }

    out.flush();
    if (!out) throw ModelIoError(IoKind::Io, "write to '" + path + "' failed");
}

ModelParams load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelIoError(IoKind::Io, "cannot open '" + path + "' for reading");

    std::istringstream first(next_header_line(in));
    std::string magic, encoding_name;
    int version = 0;
    if (!(first >> magic >> version >> encoding_name) || magic != kMagic)
        throw ModelIoError(IoKind::Version, "model file: not a wsvd-model file");
    if (version != kVersion)
        throw ModelIoError(IoKind::Version,
                           "model file: unsupported version " + std::to_string(version));
    ModelEncoding encoding;
    if (encoding_name == "binary")
        encoding = ModelEncoding::Binary;
    else if (encoding_name == "text")
        encoding = ModelEncoding::Text;
    else
        throw ModelIoError(IoKind::Corrupt, "model file: unknown encoding '" + encoding_name + "'");

    const std::string kind_line = next_header_line(in);
    std::istringstream kind_ss(kind_line);
    std::string kind_key, kind_name;
    if (!(kind_ss >> kind_key >> kind_name) || kind_key != "kind")
        throw ModelIoError(IoKind::Corrupt, "model file: expected 'kind <name>'");
    const auto kind = model_kind_from_string(kind_name);
    if (!kind) throw ModelIoError(IoKind::Corrupt, "model file: unknown kind '" + kind_name + "'");

    const std::int64_t m = parse_int_field(next_header_line(in), "m");
    const std::int64_t n = parse_int_field(next_header_line(in), "n");
    const std::int64_t k = parse_int_field(next_header_line(in), "k");
    if (next_header_line(in) != "end")
        throw ModelIoError(IoKind::Corrupt, "model file: missing 'end' marker");

    ModelParams p;
    p.kind = *kind;
    if (m < 1 || n < 1 || m > INT32_MAX || n > INT32_MAX)
        throw ModelIoError(IoKind::Shape, "model file: user/item counts out of range");
    const bool needs_factors =
        *kind != ModelKind::Average && *kind != ModelKind::Bias;
    if (k < 0 || k > INT32_MAX || (needs_factors && k < 1) || (!needs_factors && k != 0))
        throw ModelIoError(IoKind::Shape, "model file: factor count inconsistent with kind");
    p.m = std::int32_t(m);
    p.n = std::int32_t(n);
    p.k = std::int32_t(k);

    if (p.has_biases()) {
        p.user_bias.resize(std::size_t(m));
        p.item_bias.resize(std::size_t(n));
    }
    if (p.has_weights()) p.weights.resize(std::size_t(k));
    if (p.has_factors()) {
        p.user_factors.resize(std::size_t(m) * std::size_t(k));
        p.item_factors.resize(std::size_t(n) * std::size_t(k));
    }
    if (p.has_implicit()) p.implicit_factors.resize(std::size_t(n) * std::size_t(k));

    const auto require_finite = [](double v) {
        if (!std::isfinite(v))
            throw ModelIoError(IoKind::Corrupt, "model file: non-finite parameter value");
        return v;
    };
    if (encoding == ModelEncoding::Binary) {
        if (p.has_mean()) p.mean = require_finite(read_le_double(in));
        for (auto* block : block_list(p))
            for (double& v : *block) v = require_finite(read_le_double(in));
        char probe;
        if (in.read(&probe, 1); in.gcount() != 0)
            throw ModelIoError(IoKind::Corrupt, "model file: trailing data after payload");
    } else {
        const auto read_value = [&in]() {
            std::string token;
            if (!(in >> token))
                throw ModelIoError(IoKind::Corrupt, "model file: truncated payload");
            double v = 0.0;
            const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
            if (res.ec != std::errc() || res.ptr != token.data() + token.size())
                throw ModelIoError(IoKind::Corrupt, "model file: bad value '" + token + "'");
            return v;
        };
        if (p.has_mean()) p.mean = require_finite(read_value());
        for (auto* block : block_list(p))
            for (double& v : *block) v = require_finite(read_value());
        std::string probe;
        if (in >> probe)
            throw ModelIoError(IoKind::Corrupt, "model file: trailing data after payload");
    }

    return p;
}

} // namespace wsvd
