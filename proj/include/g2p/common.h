// include/g2p/common.h
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef G2P_COMMON_H_
#define G2P_COMMON_H_

#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace g2p {

// Every recoverable failure in the toolkit is an Error with a kind; the CLI
// maps kinds to exit codes and tests dispatch on them.
enum class ErrorKind {
  kShape,        // dimension mismatch / invalid shape
  kIndex,        // out-of-range index
  kParse,        // malformed input line (message names the line)
  kConfig,       // inconsistent or unknown configuration
  kVocab,        // symbol not present in a closed symbol table
  kConflict,     // word listed in two partitions
  kCoverage,     // missing/duplicate hypothesis for a test word
  kAlignment,    // no feasible alignment path
  kEmptyCorpus,  // nothing usable left after filtering
  kDivergence,   // non-finite loss during training
  kIoMagic,      // model file: wrong magic
  kIoVersion,    // model file: unsupported format version
  kIoTruncated,  // model file: unexpected end of data
  kIoChecksum,   // model file: CRC mismatch
  kIo,           // other file-system problem
  kContract,     // internal precondition violated
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void Fail(ErrorKind kind, const std::string& msg);

#define G2P_CHECK(cond, kind, msg)                        \
  do {                                                    \
    if (!(cond)) {                                        \
      std::ostringstream os_;                             \
      os_ << msg;                                         \
      ::g2p::Fail((kind), os_.str());                     \
    }                                                     \
  } while (0)

// Internal invariants; failures indicate a bug, not bad input.
#define G2P_ASSERT(cond, msg) G2P_CHECK(cond, ::g2p::ErrorKind::kContract, msg)

// Splits on any run of whitespace; no empty tokens.
std::vector<std::string> SplitWhitespace(const std::string& s);

// Splits at the first tab only; throws kParse if there is no tab.
std::pair<std::string, std::string> SplitFirstTab(const std::string& s,
                                                  int line_no);

// Decodes a UTF-8 string into one string per code point. Invalid bytes are
// passed through as single-byte units.
std::vector<std::string> SplitUtf8(const std::string& s);

std::string ToUpperAscii(const std::string& s);

std::string JoinStrings(const std::vector<std::string>& parts,
                        const std::string& sep);

// strtod-independent fixed formatting used in all output files, so artifacts
// are byte-stable across platforms and locales.
std::string FormatFixed(double value, int digits);

}  // namespace g2p

#endif  // G2P_COMMON_H_
