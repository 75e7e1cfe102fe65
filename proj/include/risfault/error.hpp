// SPDX-License-Identifier: Apache-2.0
//
// risfaultsim: RIS-aided uplink localization testbed with faulty elements
// Copyright (C) 2026 The risfaultsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace risfault
{

/// Base class of every error raised by the library.
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

class InvalidGeometryError : public Error { public: using Error::Error; };
class DegenerateGeometryError : public Error { public: using Error::Error; };
class InvalidPathSetError : public Error { public: using Error::Error; };
class InvalidInputError : public Error { public: using Error::Error; };
class DimensionError : public Error { public: using Error::Error; };
class PartitionError : public Error { public: using Error::Error; };
class IndexError : public Error { public: using Error::Error; };
class DegenerateSnrError : public Error { public: using Error::Error; };
class SizeLimitError : public Error { public: using Error::Error; };
class NoActiveElementsError : public Error { public: using Error::Error; };
class DegenerateNormalizationError : public Error { public: using Error::Error; };

// Dataset persistence. Each failure mode of the reader has its own type.
class ManifestError : public Error { public: using Error::Error; };
class IoError : public Error { public: using Error::Error; };
class FormatError : public Error { public: using Error::Error; };
class VersionMismatchError : public Error { public: using Error::Error; };
class TruncatedFileError : public Error { public: using Error::Error; };
class ChecksumError : public Error { public: using Error::Error; };

/// Results file does not conform to the schema. `record()` is the index of
/// the first offending prediction, or npos for file-level problems.
class SchemaError : public Error
{
  public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    SchemaError(const std::string &what, std::size_t record = npos)
        : Error(record == npos ? what : "predictions[" + std::to_string(record) + "]: " + what),
          record_(record)
    {
    }

    std::size_t record() const noexcept { return record_; }

  private:
    std::size_t record_;
};

/// Results file was produced for a different dataset file.
class ProvenanceError : public Error { public: using Error::Error; };

} // namespace risfault
