#ifndef WSVD_MODEL_IO_HPP
#define WSVD_MODEL_IO_HPP

#include <string>

#include "wsvd/model.hpp"

namespace wsvd {

enum class ModelEncoding { Binary, Text };

/// Model file layout
/// ------------------
/// A text header, then the parameter payload:
///
///   wsvd-model 1 <binary|text>
///   kind <average|bias|pmf|svd|svdpp|wsvd>
///   m <users>
///   n <items>
///   k <factors>
///   end
///
/// The payload is the kind's blocks in this fixed order, skipping blocks the
/// kind does not carry: mean, user biases, item biases, factor weights, user
/// factors (row-major), item factors, implicit factors. Binary payloads are
/// little-endian IEEE-754 doubles and round-trip bit for bit; text payloads
/// are shortest round-trip decimals, whitespace separated.
void save_model(const ModelParams& params, const std::string& path,
                ModelEncoding encoding = ModelEncoding::Binary);

/// Reads a model file. Throws ModelIoError with kind Version for an
/// unsupported format tag, Shape for inconsistent dimensions, Corrupt for
/// truncated or malformed payloads, Io for filesystem failures.
ModelParams load_model(const std::string& path);

} // namespace wsvd

#endif
