// tests/test_cli.cc
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

// End-to-end tests that drive the installed `g2p` binary as a subprocess.
// The binary path comes in through the G2P_BINARY_PATH compile definition.

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "g2p/lexicon.h"
#include "test_util.h"

namespace g2p {
namespace {

using testutil::TempDir;
using testutil::ToyLexicon;

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string ReadFile(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  REQUIRE(is.is_open());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void WriteFile(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  REQUIRE(os.is_open());
  os << content;
}

bool Contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

std::vector<std::string> Lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> TabFields(const std::string& line) {
  std::vector<std::string> fields;
  size_t pos = 0;
  while (true) {
    const size_t tab = line.find('\t', pos);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(pos));
      return fields;
    }
    fields.push_back(line.substr(pos, tab - pos));
    pos = tab + 1;
  }
}

// Runs `g2p <args>` with stdout/stderr captured into scratch files.
CliResult RunCli(const TempDir& scratch, const std::string& args) {
  const std::string out_path = scratch.File("run_stdout.txt");
  const std::string err_path = scratch.File("run_stderr.txt");
  const std::string cmd = std::string(G2P_BINARY_PATH) + " " + args + " >" +
                          out_path + " 2>" + err_path;
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  CliResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = ReadFile(out_path);
  r.err = ReadFile(err_path);
  return r;
}

// Writes the toy lexicon plus a 40/5/5 partition into `dir` and returns the
// five file paths used by `prepare`.
struct ToyFixture {
  std::string lexicon;
  std::string train;
  std::string valid;
  std::string test;
  std::vector<std::string> test_words;
};

ToyFixture WriteToyFixture(const TempDir& dir) {
  const std::vector<LexiconEntry> entries = ToyLexicon();
  REQUIRE(entries.size() == 50);
  ToyFixture fx;
  fx.lexicon = dir.File("toy_lexicon.tsv");
  {
    std::ofstream os(fx.lexicon);
    SerializeLexicon(entries, os);
  }
  fx.train = dir.File("train_list.txt");
  fx.valid = dir.File("valid_list.txt");
  fx.test = dir.File("test_list.txt");
  std::ofstream train_os(fx.train), valid_os(fx.valid), test_os(fx.test);
  for (size_t i = 0; i < entries.size(); ++i) {
    if (i < 40) {
      train_os << entries[i].word << "\n";
    } else if (i < 45) {
      valid_os << entries[i].word << "\n";
    } else {
      test_os << entries[i].word << "\n";
      fx.test_words.push_back(entries[i].word);
    }
  }
  return fx;
}

TEST_CASE("cli rejects bad invocations with exit code 2") {
  TempDir dir;

  SUBCASE("no subcommand") {
    const CliResult r = RunCli(dir, "");
    CHECK(r.code == 2);
  }

  SUBCASE("help exits cleanly and names the subcommands") {
    const CliResult r = RunCli(dir, "--help");
    CHECK(r.code == 0);
    CHECK(Contains(r.out, "prepare"));
    CHECK(Contains(r.out, "align"));
    CHECK(Contains(r.out, "train"));
    CHECK(Contains(r.out, "decode"));
    CHECK(Contains(r.out, "eval"));
  }

  SUBCASE("missing required setting") {
    const CliResult r = RunCli(dir, "prepare --lexicon " + dir.File("x.tsv"));
    CHECK(r.code == 2);
    CHECK(Contains(r.err, "'out' is required"));
  }

  SUBCASE("unknown config key") {
    const std::string cfg = dir.File("bad.cfg");
    WriteFile(cfg, "bogus = 1\n");
    const CliResult r = RunCli(dir, "align --config " + cfg);
    CHECK(r.code == 2);
    CHECK(Contains(r.err, "unknown config key 'bogus'"));
  }

  SUBCASE("config line without an equals sign") {
    const std::string cfg = dir.File("bad2.cfg");
    WriteFile(cfg, "# comment\njust words\n");
    const CliResult r = RunCli(dir, "align --config " + cfg);
    CHECK(r.code == 2);
    CHECK(Contains(r.err, "line 2"));
  }

  SUBCASE("missing lexicon file") {
    const CliResult r = RunCli(dir, "prepare --lexicon " + dir.File("no.tsv") +
                                        " --out " + dir.File("ds"));
    CHECK(r.code == 2);
    CHECK(Contains(r.err, "cannot open"));
  }

  SUBCASE("malformed lexicon line is reported with its line number") {
    const std::string lex = dir.File("broken.tsv");
    WriteFile(lex, "JUSTAWORDWITHOUTATAB\n");
    const CliResult r = RunCli(dir, "prepare --format tabular --lexicon " +
                                        lex + " --out " + dir.File("ds"));
    CHECK(r.code == 2);
    CHECK(Contains(r.err, "error:"));
    CHECK(Contains(r.err, "line 1"));
  }
}

TEST_CASE("cli pipeline runs prepare, align, train, decode, and eval") {
  TempDir dir;
  const ToyFixture fx = WriteToyFixture(dir);
  const std::string ds = dir.File("dataset");
  const std::string aligned = dir.File("aligned.tsv");

  // prepare
  {
    const CliResult r = RunCli(
        dir, "prepare --format tabular --lexicon " + fx.lexicon + " --train " +
                 fx.train + " --valid " + fx.valid + " --test " + fx.test +
                 " --out " + ds);
    REQUIRE(r.code == 0);
    CHECK(Contains(r.out, "[config prepare]"));
    CHECK(Contains(r.out, "format = tabular"));
    CHECK(Contains(r.out, "train 40\n"));
    CHECK(Contains(r.out, "valid 5\n"));
    CHECK(Contains(r.out, "test 5\n"));
    for (const char* name :
         {"lexicon.tsv", "letters.syms", "phonemes.syms", "train.words",
          "valid.words", "test.words", "manifest.txt"})
      CHECK(std::filesystem::exists(ds + "/" + name));
    CHECK(Contains(ReadFile(ds + "/manifest.txt"), "entries = 50"));
    // The emitted word lists are in canonical lexicon order.
    const std::vector<std::string> test_lines =
        Lines(ReadFile(ds + "/test.words"));
    std::vector<std::string> expected = fx.test_words;
    std::sort(expected.begin(), expected.end());
    CHECK(test_lines == expected);
  }

  // align, twice: the EM trace is monotone and the output is reproducible.
  std::string aligned_bytes;
  {
    const CliResult r =
        RunCli(dir, "align --data " + ds + " --out " + aligned);
    REQUIRE(r.code == 0);
    double prev_ll = -1e300;
    int iterations = 0;
    for (const std::string& line : Lines(r.out)) {
      if (line.rfind("em iteration ", 0) != 0) continue;
      ++iterations;
      const double ll = std::stod(line.substr(line.rfind(' ') + 1));
      CHECK(ll >= prev_ll - 1e-9);
      prev_ll = ll;
    }
    CHECK(iterations >= 2);
    REQUIRE(std::filesystem::exists(aligned));
    REQUIRE(std::filesystem::exists(aligned + ".valid"));
    aligned_bytes = ReadFile(aligned);
    CHECK(!aligned_bytes.empty());

    const CliResult again =
        RunCli(dir, "align --data " + ds + " --out " + aligned);
    REQUIRE(again.code == 0);
    CHECK(ReadFile(aligned) == aligned_bytes);
  }

  // train uni, piecewise, two epochs
  const std::string uni_out = dir.File("uni_run");
  {
    const CliResult r = RunCli(
        dir, "train --data " + ds + " --aligned " + aligned +
                 " --arch uni --letter-emb-dim 8 --phoneme-emb-dim 8"
                 " --hidden-dim 12 --layers 1 --window 2 --seed 7"
                 " --init-scale 0.3 --schedule piecewise --segments"
                 " 2@0.05 --minibatch 8 --out " +
                 uni_out);
    REQUIRE(r.code == 0);
    CHECK(Contains(r.out, "[config train]"));
    CHECK(Contains(r.out, "training uni model"));
    CHECK(Contains(r.out, "trained 2 epochs"));
    CHECK(std::filesystem::exists(uni_out + "/last.g2pm"));
    CHECK(std::filesystem::exists(uni_out + "/best.g2pm"));
    const std::vector<std::string> rows =
        Lines(ReadFile(uni_out + "/history.tsv"));
    REQUIRE(rows.size() == 2);
    for (size_t i = 0; i < rows.size(); ++i) {
      const std::vector<std::string> fields = TabFields(rows[i]);
      REQUIRE(fields.size() == 4);
      CHECK(fields[0] == std::to_string(i + 1));
      CHECK(!fields[1].empty());
      CHECK(!fields[2].empty());
      CHECK(fields[3] == "0.050000");
    }
  }

  // training an alignment-based model without an aligned corpus fails
  {
    const CliResult r =
        RunCli(dir, "train --data " + ds +
                        " --arch bi --schedule piecewise --segments 1@0.1"
                        " --out " +
                        dir.File("nope"));
    CHECK(r.code == 2);
    CHECK(Contains(r.err, "needs an aligned corpus"));
  }

  // enc-dec ignores the aligned corpus and says so
  {
    const CliResult r = RunCli(
        dir, "train --data " + ds + " --aligned " + aligned +
                 " --arch encdec --letter-emb-dim 8 --phoneme-emb-dim 8"
                 " --hidden-dim 12 --layers 1 --seed 3 --schedule piecewise"
                 " --segments 1@0.05 --minibatch 8 --out " +
                 dir.File("encdec_run"));
    REQUIRE(r.code == 0);
    CHECK(Contains(r.err, "enc-dec training ignores the aligned corpus"));
    CHECK(Contains(r.out, "training encdec model"));
  }

  // decode the test partition with the uni model
  const std::string hyp = dir.File("hyp.tsv");
  {
    const CliResult r =
        RunCli(dir, "decode --model " + uni_out + "/last.g2pm --words " + ds +
                        "/test.words --band 3 --max-beam 50 --out " + hyp);
    REQUIRE(r.code == 0);
    CHECK(Contains(r.out, "decoded 5 of 5 words"));
    const std::vector<std::string> lines = Lines(ReadFile(hyp));
    REQUIRE(lines.size() == 5);
    for (const std::string& line : lines)
      CHECK(TabFields(line).size() == 3);
  }

  // a word using a letter the model never saw fails that word only
  {
    const std::string words = dir.File("mixed.words");
    WriteFile(words, "PINE\nQZ\n");
    const std::string out = dir.File("partial.tsv");
    const CliResult r =
        RunCli(dir, "decode --model " + uni_out + "/last.g2pm --words " +
                        words + " --out " + out);
    CHECK(r.code == 4);
    CHECK(Contains(r.err, "decode failed for word 'QZ' (index 1)"));
    CHECK(Contains(r.out, "decoded 1 of 2 words"));
    const std::vector<std::string> lines = Lines(ReadFile(out));
    REQUIRE(lines.size() == 1);
    CHECK(TabFields(lines[0])[0] == "PINE");
  }

  // eval the decode output against the test partition
  {
    const std::string report = dir.File("report.tsv");
    const CliResult r = RunCli(dir, "eval --hyp " + hyp + " --data " + ds +
                                        " --partition test --out " + report);
    REQUIRE(r.code == 0);
    CHECK(Contains(r.out, "PER "));
    CHECK(Contains(r.out, "% WER "));
    const std::vector<std::string> lines = Lines(ReadFile(report));
    REQUIRE(lines.size() == 5);
    for (const std::string& line : lines)
      CHECK(TabFields(line).size() == 4);
  }

  // eval fails when a test word has no hypothesis
  {
    const std::vector<std::string> lines = Lines(ReadFile(hyp));
    std::string truncated;
    for (size_t i = 1; i < lines.size(); ++i) truncated += lines[i] + "\n";
    const std::string partial_hyp = dir.File("partial_hyp.tsv");
    WriteFile(partial_hyp, truncated);
    const CliResult r = RunCli(
        dir, "eval --hyp " + partial_hyp + " --data " + ds + " --partition test");
    CHECK(r.code == 2);
    const std::string missing = TabFields(lines[0])[0];
    CHECK(Contains(r.err, missing));
  }
}

}  // namespace
}  // namespace g2p
