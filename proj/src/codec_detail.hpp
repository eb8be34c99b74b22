#pragma once

#include "binary_io.hpp"
#include "svmf/fingerprint.hpp"

namespace svmf::detail {

// Reads one embedded fingerprint payload starting at the reader cursor.
SVMF read_svmf_payload(ByteReader& reader);

}  // namespace svmf::detail
