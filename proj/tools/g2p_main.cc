// tools/g2p_main.cc
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
//
// Pipeline front end: prepare -> align -> train -> decode -> eval.
// Settings come from documented defaults, then an optional flat
// `key = value` config file, then command-line flags; the effective
// configuration is echoed before anything runs. Exit codes: 0 success,
// 2 input/config error, 3 training divergence, 4 partial decode failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "g2p/aligner.h"
#include "g2p/decoder.h"
#include "g2p/kernels.h"
#include "g2p/lexicon.h"
#include "g2p/metrics.h"
#include "g2p/model.h"
#include "g2p/model_io.h"
#include "g2p/trainer.h"

namespace g2p {
namespace {

namespace fs = std::filesystem;
using Side = SymbolTable::Side;

std::string Trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// The full setting surface of one command: every key exists up front with
// its default; a config file and then flags overwrite values.
class RunConfig {
 public:
  RunConfig(std::string command,
            std::vector<std::pair<std::string, std::string>> defaults)
      : command_(std::move(command)) {
    for (auto& [k, v] : defaults) values_.emplace(k, v);
  }

  void LoadFile(const std::string& path) {
    std::ifstream is(path);
    G2P_CHECK(is.is_open(), ErrorKind::kIo,
              "cannot open config file '" << path << "'");
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
      ++line_no;
      const std::string t = Trim(line);
      if (t.empty() || t[0] == '#') continue;
      const size_t eq = t.find('=');
      G2P_CHECK(eq != std::string::npos, ErrorKind::kConfig,
                "config line " << line_no << " is not 'key = value'");
      Set(Trim(t.substr(0, eq)), Trim(t.substr(eq + 1)));
    }
  }

  void Set(const std::string& key, const std::string& value) {
    auto it = values_.find(key);
    G2P_CHECK(it != values_.end(), ErrorKind::kConfig,
              "unknown config key '" << key << "' for " << command_);
    it->second = value;
  }

  const std::string& Get(const std::string& key) const {
    auto it = values_.find(key);
    G2P_ASSERT(it != values_.end(), "unregistered key " << key);
    return it->second;
  }

  const std::string& GetRequired(const std::string& key) const {
    const std::string& v = Get(key);
    G2P_CHECK(!v.empty(), ErrorKind::kConfig,
              "setting '" << key << "' is required for " << command_);
    return v;
  }

  int GetInt(const std::string& key) const {
    try {
      size_t used = 0;
      const int v = std::stoi(Get(key), &used);
      G2P_CHECK(used == Get(key).size(), ErrorKind::kConfig, "");
      return v;
    } catch (...) {
      Fail(ErrorKind::kConfig,
           "setting '" + key + "' needs an integer, got '" + Get(key) + "'");
    }
  }

  double GetDouble(const std::string& key) const {
    try {
      size_t used = 0;
      const double v = std::stod(Get(key), &used);
      G2P_CHECK(used == Get(key).size(), ErrorKind::kConfig, "");
      return v;
    } catch (...) {
      Fail(ErrorKind::kConfig,
           "setting '" + key + "' needs a number, got '" + Get(key) + "'");
    }
  }

  uint64_t GetU64(const std::string& key) const {
    try {
      size_t used = 0;
      const uint64_t v = std::stoull(Get(key), &used);
      G2P_CHECK(used == Get(key).size(), ErrorKind::kConfig, "");
      return v;
    } catch (...) {
      Fail(ErrorKind::kConfig, "setting '" + key +
                                   "' needs an unsigned integer, got '" +
                                   Get(key) + "'");
    }
  }

  bool GetBool(const std::string& key) const {
    const std::string& v = Get(key);
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    Fail(ErrorKind::kConfig,
         "setting '" + key + "' needs true or false, got '" + v + "'");
  }

  void Echo(std::ostream& os) const {
    os << "[config " << command_ << "]\n";
    for (const auto& [k, v] : values_) os << k << " = " << v << "\n";
  }

 private:
  std::string command_;
  std::map<std::string, std::string> values_;
};

// Flag values staged during parsing, applied on top of the config file.
struct CommandCtx {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;
};

void AddKey(CLI::App* cmd, CommandCtx* ctx, const std::string& flag,
            const std::string& key, const std::string& help) {
  cmd->add_option_function<std::string>(
      flag,
      [ctx, key](const std::string& v) { ctx->overrides.emplace_back(key, v); },
      help);
}

RunConfig Resolve(const std::string& command, const CommandCtx& ctx,
                  std::vector<std::pair<std::string, std::string>> defaults) {
  RunConfig cfg(command, std::move(defaults));
  if (!ctx.config_path.empty()) cfg.LoadFile(ctx.config_path);
  for (const auto& [k, v] : ctx.overrides) cfg.Set(k, v);
  cfg.Echo(std::cout);
  return cfg;
}

std::ifstream OpenIn(const std::string& path, const char* what) {
  std::ifstream is(path);
  G2P_CHECK(is.is_open(), ErrorKind::kIo,
            "cannot open " << what << " '" << path << "'");
  return is;
}

std::ofstream OpenOut(const std::string& path, const char* what) {
  std::ofstream os(path);
  G2P_CHECK(os.is_open(), ErrorKind::kIo,
            "cannot open " << what << " '" << path << "' for writing");
  return os;
}

void CloseOut(std::ofstream* os, const std::string& path) {
  os->flush();
  G2P_CHECK(os->good(), ErrorKind::kIo, "write failed: '" << path << "'");
}

std::vector<std::string> MaybeWordList(const std::string& path,
                                       const char* what) {
  if (path.empty()) return {};
  std::ifstream is = OpenIn(path, what);
  return ReadWordList(is);
}

void WarnWords(const std::vector<std::string>& words, const char* what) {
  if (words.empty()) return;
  std::cerr << "warning: " << words.size() << " words " << what << ":";
  for (size_t i = 0; i < words.size() && i < 10; ++i)
    std::cerr << " " << words[i];
  if (words.size() > 10) std::cerr << " ...";
  std::cerr << "\n";
}

struct Dataset {
  std::vector<LexiconEntry> entries;
  DatasetSplit split;
  SymbolTable letters{Side::kLetter};
  SymbolTable phonemes{Side::kPhoneme};
};

Dataset LoadDataset(const std::string& dir) {
  Dataset d;
  {
    std::ifstream is = OpenIn(dir + "/lexicon.tsv", "lexicon");
    d.entries = ParseLexicon(is, LexiconFormat::kTabular, false);
  }
  SplitReport report;
  d.split = LoadSplit(d.entries,
                      MaybeWordList(dir + "/train.words", "partition"),
                      MaybeWordList(dir + "/valid.words", "partition"),
                      MaybeWordList(dir + "/test.words", "partition"),
                      &report);
  {
    std::ifstream is = OpenIn(dir + "/letters.syms", "symbol table");
    d.letters = SymbolTable::Read(is, Side::kLetter);
  }
  {
    std::ifstream is = OpenIn(dir + "/phonemes.syms", "symbol table");
    d.phonemes = SymbolTable::Read(is, Side::kPhoneme);
  }
  return d;
}

const std::vector<LexiconEntry>& PickPartition(const Dataset& ds,
                                               const std::string& name) {
  if (name == "train") return ds.split.train;
  if (name == "valid") return ds.split.validation;
  if (name == "test") return ds.split.test;
  Fail(ErrorKind::kConfig,
       "partition must be train, valid, or test, got '" + name + "'");
}

int CmdPrepare(const RunConfig& cfg) {
  const std::string& lexicon_path = cfg.GetRequired("lexicon");
  const std::string& out = cfg.GetRequired("out");
  const std::string& format_name = cfg.Get("format");
  LexiconFormat format;
  if (format_name == "cmudict") {
    format = LexiconFormat::kCmudict;
  } else if (format_name == "tabular") {
    format = LexiconFormat::kTabular;
  } else {
    Fail(ErrorKind::kConfig,
         "format must be cmudict or tabular, got '" + format_name + "'");
  }

  std::ifstream is = OpenIn(lexicon_path, "lexicon");
  const std::vector<LexiconEntry> entries =
      ParseLexicon(is, format, cfg.GetBool("strip_stress"));

  SplitReport report;
  const DatasetSplit split =
      LoadSplit(entries, MaybeWordList(cfg.Get("train_words"), "word list"),
                MaybeWordList(cfg.Get("valid_words"), "word list"),
                MaybeWordList(cfg.Get("test_words"), "word list"), &report);
  WarnWords(report.missing, "listed but missing from the lexicon");
  WarnWords(report.unlisted, "in the lexicon but not listed in any partition");

  SymbolTable letters(Side::kLetter), phonemes(Side::kPhoneme);
  BuildSymbolTables(entries, &letters, &phonemes);

  fs::create_directories(out);
  {
    std::ofstream os = OpenOut(out + "/lexicon.tsv", "lexicon");
    SerializeLexicon(entries, os);
    CloseOut(&os, out + "/lexicon.tsv");
  }
  {
    std::ofstream os = OpenOut(out + "/letters.syms", "symbol table");
    letters.Write(os);
    CloseOut(&os, out + "/letters.syms");
  }
  {
    std::ofstream os = OpenOut(out + "/phonemes.syms", "symbol table");
    phonemes.Write(os);
    CloseOut(&os, out + "/phonemes.syms");
  }
  const std::vector<std::pair<std::string, const std::vector<LexiconEntry>*>>
      parts = {{"train", &split.train},
               {"valid", &split.validation},
               {"test", &split.test}};
  for (const auto& [name, part] : parts) {
    const std::string path = out + "/" + name + ".words";
    std::ofstream os = OpenOut(path, "word list");
    for (const LexiconEntry& e : *part) os << e.word << "\n";
    CloseOut(&os, path);
  }
  {
    std::ofstream os = OpenOut(out + "/manifest.txt", "manifest");
    cfg.Echo(os);
    os << "[counts]\n";
    os << "entries = " << entries.size() << "\n";
    os << "train = " << split.train.size() << "\n";
    os << "valid = " << split.validation.size() << "\n";
    os << "test = " << split.test.size() << "\n";
    os << "letters = " << letters.size() << "\n";
    os << "phonemes = " << phonemes.size() << "\n";
    CloseOut(&os, out + "/manifest.txt");
  }
  std::cout << "train " << split.train.size() << "\n"
            << "valid " << split.validation.size() << "\n"
            << "test " << split.test.size() << "\n"
            << "letters " << letters.size() << "\n"
            << "phonemes " << phonemes.size() << "\n";
  return 0;
}

int CmdAlign(const RunConfig& cfg) {
  const Dataset ds = LoadDataset(cfg.GetRequired("data"));
  const std::string& out = cfg.GetRequired("out");

  AlignerStats stats;
  const ChunkProbTable table =
      EmTrainAligner(ds.split.train, cfg.GetInt("em_iters"),
                     cfg.GetDouble("em_tol"), &stats);
  for (size_t i = 0; i < stats.iteration_ll.size(); ++i)
    std::cout << "em iteration " << i << " log-likelihood "
              << FormatFixed(stats.iteration_ll[i], 6) << "\n";
  if (!stats.infeasible.empty()) {
    std::cout << "skipped " << stats.infeasible.size()
              << " infeasible pairs:\n";
    for (const auto& [word, pi] : stats.infeasible)
      std::cout << "  " << word << " (pronunciation " << pi << ")\n";
  }

  const auto write_aligned = [&](const std::vector<LexiconEntry>& entries,
                                 const std::string& path) {
    const AlignedCorpus corpus = AlignCorpus(entries, table, nullptr);
    for (const AlignmentFailure& f : corpus.failures)
      std::cerr << "warning: could not align " << f.word << " (pronunciation "
                << f.pron_index << "): " << f.reason << "\n";
    std::ofstream os = OpenOut(path, "aligned corpus");
    WriteAlignedCorpus(corpus.pairs, os);
    CloseOut(&os, path);
    std::cout << "aligned " << corpus.pairs.size() << " pairs to " << path
              << "\n";
  };
  write_aligned(ds.split.train, out);
  write_aligned(ds.split.validation, out + ".valid");
  return 0;
}

// Reads an aligned corpus and encodes it against the symbol tables. With
// drop_unknown set, pairs using an output symbol the tables lack (compound
// chunks never seen in training alignments) are dropped and counted instead
// of failing the run; otherwise an unknown symbol is an error.
std::vector<AlignedExample> EncodeAlignedFile(const std::string& path,
                                              const SymbolTable& letters,
                                              const SymbolTable& phonemes,
                                              bool drop_unknown,
                                              int* dropped) {
  std::ifstream is = OpenIn(path, "aligned corpus");
  const std::vector<AlignedPair> pairs = ReadAlignedCorpus(is);
  std::vector<AlignedExample> out;
  out.reserve(pairs.size());
  for (const AlignedPair& pair : pairs) {
    if (drop_unknown) {
      bool known = true;
      for (const Chunk& c : pair.slots)
        if (!phonemes.Contains(c.ToString())) known = false;
      if (!known) {
        ++*dropped;
        continue;
      }
    }
    out.push_back(EncodeAligned(pair, letters, phonemes));
  }
  return out;
}

int CmdTrain(const RunConfig& cfg) {
  const Dataset ds = LoadDataset(cfg.GetRequired("data"));
  const std::string& out = cfg.GetRequired("out");

  ModelConfig mc;
  mc.arch = ArchFromName(cfg.Get("arch"));
  mc.letter_emb_dim = cfg.GetInt("letter_emb_dim");
  mc.phoneme_emb_dim = cfg.GetInt("phoneme_emb_dim");
  mc.hidden_dim = cfg.GetInt("hidden_dim");
  mc.layers = cfg.GetInt("layers");
  mc.window = cfg.GetInt("window");
  mc.seed = cfg.GetU64("seed");
  mc.Validate();

  TrainSchedule sched;
  const std::string& mode = cfg.Get("schedule");
  if (mode == "validation") {
    sched.mode = ScheduleMode::kValidationHalving;
  } else if (mode == "piecewise") {
    sched.mode = ScheduleMode::kPiecewise;
  } else {
    Fail(ErrorKind::kConfig,
         "schedule must be validation or piecewise, got '" + mode + "'");
  }
  sched.initial_lr = cfg.GetDouble("lr");
  sched.minibatch = cfg.GetInt("minibatch");
  sched.max_epochs = cfg.GetInt("max_epochs");
  sched.sort_by_length = cfg.GetBool("sort_by_length");
  sched.clip = cfg.GetDouble("clip");
  if (sched.mode == ScheduleMode::kPiecewise) {
    // segments: comma-separated `epochs@lr`, e.g. `10@0.1,2@0.05,70@0.01`.
    const std::string& plan = cfg.GetRequired("segments");
    size_t pos = 0;
    while (pos <= plan.size()) {
      size_t comma = plan.find(',', pos);
      if (comma == std::string::npos) comma = plan.size();
      const std::string item = Trim(plan.substr(pos, comma - pos));
      const size_t at = item.find('@');
      G2P_CHECK(at != std::string::npos && at > 0 && at + 1 < item.size(),
                ErrorKind::kConfig,
                "segment '" << item << "' is not 'epochs@lr'");
      try {
        sched.segments.push_back(
            {std::stoi(item.substr(0, at)), std::stod(item.substr(at + 1))});
      } catch (...) {
        Fail(ErrorKind::kConfig, "segment '" + item + "' is not 'epochs@lr'");
      }
      pos = comma + 1;
    }
  }

  const std::string& aligned = cfg.Get("aligned");
  const double init_scale = cfg.GetDouble("init_scale");
  const bool keep_all = cfg.GetBool("keep_all");
  fs::create_directories(out);

  G2PModel<float> model;
  TrainResult result;
  const CheckpointSink sink = [&model, &out, keep_all](const EpochRecord& rec,
                                                       bool is_best) {
    SaveModelFile(model, out + "/last.g2pm");
    if (is_best) SaveModelFile(model, out + "/best.g2pm");
    if (keep_all)
      SaveModelFile(model,
                    out + "/epoch_" + std::to_string(rec.epoch) + ".g2pm");
    std::cout << "epoch " << rec.epoch << " train_ce "
              << FormatFixed(rec.train_ce, 6) << " valid_ce "
              << (rec.has_valid ? FormatFixed(rec.valid_ce, 6)
                                : std::string("-"))
              << " lr " << FormatFixed(rec.lr, 6) << (is_best ? " (best)" : "")
              << "\n";
    std::cout.flush();
  };

  if (mc.arch == Arch::kEncDec) {
    if (!aligned.empty())
      std::cerr << "warning: enc-dec training ignores the aligned corpus\n";
    std::vector<SeqExample> train_ex, valid_ex;
    for (const LexiconEntry& e : ds.split.train)
      for (const auto& pron : e.pronunciations)
        train_ex.push_back(EncodeSeq(e.Letters(), pron, ds.letters,
                                     ds.phonemes));
    for (const LexiconEntry& e : ds.split.validation)
      for (const auto& pron : e.pronunciations)
        valid_ex.push_back(EncodeSeq(e.Letters(), pron, ds.letters,
                                     ds.phonemes));
    model = BuildModel<float>(mc, ds.letters, ds.phonemes,
                       static_cast<float>(init_scale));
    std::cout << "training " << ArchName(mc.arch) << " model with "
              << model.ParamCount() << " parameters on " << train_ex.size()
              << " examples\n";
    result = TrainEncDecModel(&model, train_ex, valid_ex, sched, sink);
  } else {
    G2P_CHECK(!aligned.empty(), ErrorKind::kConfig,
              "training a " << ArchName(mc.arch)
                            << " model needs an aligned corpus (--aligned)");
    // The output vocabulary is the prepared phoneme table plus every
    // compound chunk the training alignments use, in sorted order.
    SymbolTable phonemes = ds.phonemes;
    {
      std::ifstream is = OpenIn(aligned, "aligned corpus");
      std::set<std::string> compounds;
      for (const AlignedPair& pair : ReadAlignedCorpus(is))
        for (const Chunk& c : pair.slots)
          if (c.PhonemeCount() == 2 && !phonemes.Contains(c.ToString()))
            compounds.insert(c.ToString());
      for (const std::string& sym : compounds) phonemes.Add(sym);
    }
    int dropped = 0;
    const std::vector<AlignedExample> train_ex =
        EncodeAlignedFile(aligned, ds.letters, phonemes, false, &dropped);
    std::vector<AlignedExample> valid_ex;
    const std::string valid_path = aligned + ".valid";
    if (fs::exists(valid_path)) {
      valid_ex =
          EncodeAlignedFile(valid_path, ds.letters, phonemes, true, &dropped);
      if (dropped > 0)
        std::cerr << "warning: dropped " << dropped
                  << " validation pairs using compound chunks never seen in "
                     "training alignments\n";
    } else {
      G2P_CHECK(sched.mode == ScheduleMode::kPiecewise, ErrorKind::kConfig,
                "validation schedule needs '" << valid_path << "'");
    }
    model = BuildModel<float>(mc, ds.letters, phonemes,
                       static_cast<float>(init_scale));
    std::cout << "training " << ArchName(mc.arch) << " model with "
              << model.ParamCount() << " parameters on " << train_ex.size()
              << " examples\n";
    result = TrainAlignModel(&model, train_ex, valid_ex, sched, sink);
  }

  {
    const std::string path = out + "/history.tsv";
    std::ofstream os = OpenOut(path, "history");
    for (const EpochRecord& rec : result.history)
      os << rec.epoch << '\t' << FormatFixed(rec.train_ce, 6) << '\t'
         << (rec.has_valid ? FormatFixed(rec.valid_ce, 6) : std::string("-"))
         << '\t' << FormatFixed(rec.lr, 6) << '\n';
    CloseOut(&os, path);
  }
  std::cout << "trained " << result.history.size() << " epochs, best epoch "
            << result.best_epoch << "\n";
  return 0;
}

int CmdDecode(const RunConfig& cfg) {
  const G2PModel<float> model = LoadModelFile(cfg.GetRequired("model"));
  std::ifstream is = OpenIn(cfg.GetRequired("words"), "word list");
  const std::vector<std::string> words = ReadWordList(is);

  BeamConfig bc;
  bc.band = cfg.GetDouble("band");
  bc.max_beam = cfg.GetInt("max_beam");
  bc.max_length = cfg.GetInt("max_length");
  bc.nbest = cfg.GetInt("nbest");
  bc.Validate();

  const BatchDecodeResult res =
      DecodeBatch(model, words, bc, cfg.GetInt("workers"));
  std::set<size_t> failed;
  for (const DecodeFailure& f : res.failures) failed.insert(f.index);

  const std::string& out = cfg.GetRequired("out");
  std::ofstream os = OpenOut(out, "decode output");
  for (size_t i = 0; i < words.size(); ++i)
    if (!failed.count(i)) WriteDecodeLines(os, words[i], res.results[i]);
  CloseOut(&os, out);

  for (const DecodeFailure& f : res.failures)
    std::cerr << "decode failed for word '" << f.word << "' (index "
              << f.index << "): " << f.message << "\n";
  std::cout << "decoded " << words.size() - failed.size() << " of "
            << words.size() << " words\n";
  return res.failures.empty() ? 0 : 4;
}

int CmdEval(const RunConfig& cfg) {
  const Dataset ds = LoadDataset(cfg.GetRequired("data"));
  const std::vector<LexiconEntry>& entries =
      PickPartition(ds, cfg.Get("partition"));
  const int workers = cfg.GetInt("workers");
  if (workers > 0) kernels::SetNumThreads(workers);

  std::ifstream is = OpenIn(cfg.GetRequired("hyp"), "hypothesis file");
  const EvalReport report = Evaluate(ReadHypotheses(is), entries);

  const std::string& out = cfg.Get("out");
  if (!out.empty()) {
    std::ofstream os = OpenOut(out, "report");
    WriteEvalRecords(report, os);
    CloseOut(&os, out);
  }
  std::cout << report.Summary() << "\n";
  return 0;
}

int Run(int argc, char** argv) {
  CLI::App app{"grapheme-to-phoneme toolkit"};
  app.require_subcommand(1);

  CommandCtx prep_ctx, align_ctx, train_ctx, dec_ctx, eval_ctx;

  CLI::App* prep = app.add_subcommand(
      "prepare", "parse a lexicon and write a canonical dataset directory");
  prep->add_option("--config", prep_ctx.config_path, "settings file");
  AddKey(prep, &prep_ctx, "--lexicon", "lexicon", "source lexicon path");
  AddKey(prep, &prep_ctx, "--format", "format", "cmudict or tabular");
  AddKey(prep, &prep_ctx, "--strip-stress", "strip_stress",
         "strip trailing stress digits from phonemes (true/false)");
  AddKey(prep, &prep_ctx, "--train", "train_words", "training word list");
  AddKey(prep, &prep_ctx, "--valid", "valid_words", "validation word list");
  AddKey(prep, &prep_ctx, "--test", "test_words", "test word list");
  AddKey(prep, &prep_ctx, "--out", "out", "output dataset directory");

  CLI::App* align = app.add_subcommand(
      "align", "train the EM chunk aligner and align train/valid pairs");
  align->add_option("--config", align_ctx.config_path, "settings file");
  AddKey(align, &align_ctx, "--data", "data", "prepared dataset directory");
  AddKey(align, &align_ctx, "--em-iters", "em_iters", "max EM iterations");
  AddKey(align, &align_ctx, "--em-tol", "em_tol",
         "stop once the log-likelihood gain drops below this");
  AddKey(align, &align_ctx, "--out", "out",
         "aligned training corpus path (validation goes to <out>.valid)");

  CLI::App* train =
      app.add_subcommand("train", "train a model and write checkpoints");
  train->add_option("--config", train_ctx.config_path, "settings file");
  AddKey(train, &train_ctx, "--data", "data", "prepared dataset directory");
  AddKey(train, &train_ctx, "--aligned", "aligned",
         "aligned training corpus (uni/bi only)");
  AddKey(train, &train_ctx, "--arch", "arch", "encdec, uni, or bi");
  AddKey(train, &train_ctx, "--letter-emb-dim", "letter_emb_dim",
         "letter embedding size");
  AddKey(train, &train_ctx, "--phoneme-emb-dim", "phoneme_emb_dim",
         "phoneme embedding size");
  AddKey(train, &train_ctx, "--hidden-dim", "hidden_dim", "LSTM cell size");
  AddKey(train, &train_ctx, "--layers", "layers", "stack depth");
  AddKey(train, &train_ctx, "--window", "window",
         "letters visible per position (uni/bi)");
  AddKey(train, &train_ctx, "--seed", "seed", "RNG seed for the whole run");
  AddKey(train, &train_ctx, "--init-scale", "init_scale",
         "uniform init half-width");
  AddKey(train, &train_ctx, "--schedule", "schedule",
         "validation or piecewise");
  AddKey(train, &train_ctx, "--lr", "lr",
         "initial learning rate (validation schedule)");
  AddKey(train, &train_ctx, "--segments", "segments",
         "piecewise segments, e.g. 10@0.1,2@0.05,70@0.01");
  AddKey(train, &train_ctx, "--minibatch", "minibatch", "examples per update");
  AddKey(train, &train_ctx, "--max-epochs", "max_epochs",
         "epoch cap (validation schedule)");
  AddKey(train, &train_ctx, "--sort-by-length", "sort_by_length",
         "batch same-length examples together (true/false)");
  AddKey(train, &train_ctx, "--clip", "clip",
         "elementwise gradient clip (0 disables)");
  AddKey(train, &train_ctx, "--keep-all", "keep_all",
         "also keep a checkpoint per epoch (true/false)");
  AddKey(train, &train_ctx, "--out", "out", "output directory");

  CLI::App* dec =
      app.add_subcommand("decode", "beam-decode a word list with a model");
  dec->add_option("--config", dec_ctx.config_path, "settings file");
  AddKey(dec, &dec_ctx, "--model", "model", "model checkpoint path");
  AddKey(dec, &dec_ctx, "--words", "words", "word list to decode");
  AddKey(dec, &dec_ctx, "--band", "band",
         "log-likelihood pruning band (0 keeps only the best)");
  AddKey(dec, &dec_ctx, "--max-beam", "max_beam", "live hypothesis cap");
  AddKey(dec, &dec_ctx, "--max-length", "max_length",
         "enc-dec output length cap (0 = 4*letters+5)");
  AddKey(dec, &dec_ctx, "--nbest", "nbest", "hypotheses kept per word");
  AddKey(dec, &dec_ctx, "--workers", "workers",
         "parallel decode workers (0 = backend default)");
  AddKey(dec, &dec_ctx, "--out", "out", "decode output path");

  CLI::App* eval =
      app.add_subcommand("eval", "score a decode file against a partition");
  eval->add_option("--config", eval_ctx.config_path, "settings file");
  AddKey(eval, &eval_ctx, "--hyp", "hyp", "decode output to score");
  AddKey(eval, &eval_ctx, "--data", "data", "prepared dataset directory");
  AddKey(eval, &eval_ctx, "--partition", "partition",
         "train, valid, or test");
  AddKey(eval, &eval_ctx, "--out", "out",
         "per-word TSV report path (optional)");
  AddKey(eval, &eval_ctx, "--workers", "workers",
         "parallelism cap (0 = backend default)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (prep->parsed())
      return CmdPrepare(Resolve("prepare", prep_ctx,
                                {{"lexicon", ""},
                                 {"format", "cmudict"},
                                 {"strip_stress", "true"},
                                 {"train_words", ""},
                                 {"valid_words", ""},
                                 {"test_words", ""},
                                 {"out", ""}}));
    if (align->parsed())
      return CmdAlign(Resolve("align", align_ctx,
                              {{"data", ""},
                               {"em_iters", "100"},
                               {"em_tol", "0.0001"},
                               {"out", ""}}));
    if (train->parsed())
      return CmdTrain(Resolve("train", train_ctx,
                              {{"data", ""},
                               {"aligned", ""},
                               {"arch", "bi"},
                               {"letter_emb_dim", "50"},
                               {"phoneme_emb_dim", "50"},
                               {"hidden_dim", "300"},
                               {"layers", "1"},
                               {"window", "3"},
                               {"seed", "1"},
                               {"init_scale", "0.08"},
                               {"schedule", "validation"},
                               {"lr", "0.1"},
                               {"segments", ""},
                               {"minibatch", "100"},
                               {"max_epochs", "100"},
                               {"sort_by_length", "true"},
                               {"clip", "1.0"},
                               {"keep_all", "false"},
                               {"out", ""}}));
    if (dec->parsed())
      return CmdDecode(Resolve("decode", dec_ctx,
                               {{"model", ""},
                                {"words", ""},
                                {"band", "1.0"},
                                {"max_beam", "100"},
                                {"max_length", "0"},
                                {"nbest", "1"},
                                {"workers", "0"},
                                {"out", ""}}));
    if (eval->parsed())
      return CmdEval(Resolve("eval", eval_ctx,
                             {{"hyp", ""},
                              {"data", ""},
                              {"partition", "test"},
                              {"out", ""},
                              {"workers", "0"}}));
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::kDivergence ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace
}  // namespace g2p

int main(int argc, char** argv) { return g2p::Run(argc, argv); }
