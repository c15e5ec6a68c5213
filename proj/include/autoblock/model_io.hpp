#pragma once

#include <iosfwd>
#include <string>

#include "autoblock/signatures.hpp"

namespace autoblock {

inline constexpr std::uint32_t kModelFormatVersion = 1;

/// Little-endian binary model file; every real value is stored as float32.
/// Layout in docs/file_formats.md. Loading rejects other versions.
void save_model(const SignatureModel& model, std::ostream& out);
void save_model(const SignatureModel& model, const std::string& path);
SignatureModel load_model(std::istream& in);
SignatureModel load_model(const std::string& path);

/// The model as it reads back from disk (float32-rounded values).
SignatureModel round_trip(const SignatureModel& model);

/// Empty when equal; otherwise a message listing attributes missing on
/// either side or out of order.
std::string schema_difference(const std::vector<std::string>& model_schema,
                              const std::vector<std::string>& data_schema);

}  // namespace autoblock
