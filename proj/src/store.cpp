#include <fstream>
#include <iomanip>
#include <sstream>

#include "pslshade/errors.hpp"
#include "pslshade/harness.hpp"

namespace pslshade::harness {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kRecordHeader = "algorithm,function,combo,dim,rep,checkpoint_k,nfe,error";

std::string cell_stem(const CellId& id) {
  return "F" + std::to_string(id.function) + "_" + std::string(suite::combo_token(id.combo)) + "_r" +
         std::to_string(id.repetition);
}

fs::path cell_dir(const fs::path& root, std::string_view kind, const CellId& id) {
  return root / kind / id.algorithm / ("D" + std::to_string(id.dimension));
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(line);
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

void write_atomically(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out) throw InputError("failed writing '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

}  // namespace

void write_record(std::ostream& out, const metrics::RunRecord& record) {
  out << ResultStore::kRecordSchema << '\n' << kRecordHeader << '\n';
  out << std::setprecision(17);
  for (std::size_t k = 0; k < record.checkpoints.size(); ++k) {
    out << record.algorithm << ',' << record.function << ',' << suite::to_string(record.combo) << ','
        << record.dimension << ',' << record.repetition << ',' << k << ',' << record.checkpoints[k].nfe << ','
        << record.checkpoints[k].error << '\n';
  }
}

metrics::RunRecord read_record(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != ResultStore::kRecordSchema)
    throw InputError("record file has an unknown schema line");
  if (!std::getline(in, line) || line != kRecordHeader) throw InputError("record file has an unexpected header");
  metrics::RunRecord record;
  std::size_t expected_k = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 8) throw InputError("malformed record row '" + line + "'");
    try {
      if (expected_k == 0) {
        record.algorithm = fields[0];
        record.function = std::stoi(fields[1]);
        record.combo = suite::parse_combo(fields[2]);
        record.dimension = std::stoul(fields[3]);
        record.repetition = std::stoi(fields[4]);
      }
      if (std::stoul(fields[5]) != expected_k) throw InputError("checkpoint rows out of order");
      record.checkpoints.push_back({std::stoll(fields[6]), std::stod(fields[7])});
    } catch (const std::logic_error& e) {
      throw InputError("malformed record row '" + line + "': " + e.what());
    }
    ++expected_k;
  }
  if (record.checkpoints.empty()) throw InputError("record file has no checkpoints");
  return record;
}

CellId cell_id(const Cell& cell) {
  return CellId{cell.variant.label, cell.dimension, cell.function, cell.combo, cell.repetition};
}

ResultStore::ResultStore(fs::path root) : root_(std::move(root)) {
  fs::create_directories(root_);
  load_manifest();
}

fs::path ResultStore::record_path(const CellId& id) const {
  return cell_dir(root_, "records", id) / (cell_stem(id) + ".csv");
}

fs::path ResultStore::diagnostics_path(const CellId& id) const {
  return cell_dir(root_, "diagnostics", id) / (cell_stem(id) + ".csv");
}

fs::path ResultStore::model_dump_path(const CellId& id) const {
  return cell_dir(root_, "models", id) / (cell_stem(id) + ".csv");
}

void ResultStore::load_manifest() {
  const fs::path path = root_ / "manifest.tsv";
  if (!fs::exists(path)) return;
  std::ifstream in(path);
  std::string line;
  if (!std::getline(in, line) || line != kManifestSchema)
    throw InputError("store manifest '" + path.string() + "' has an unknown schema");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, '\t');
    if (f.size() != 8) throw InputError("malformed manifest line '" + line + "'");
    try {
      CellId id{f[1], std::stoul(f[2]), std::stoi(f[3]), suite::parse_combo(f[4]), std::stoi(f[5])};
      ManifestEntry entry;
      if (f[0] == "ok") {
        entry.status = CellStatus::Ok;
      } else if (f[0] == "failed") {
        entry.status = CellStatus::Failed;
      } else {
        throw InputError("unknown status '" + f[0] + "'");
      }
      entry.fingerprint = f[6];
      entry.message = f[7];
      // An ok entry whose record vanished is treated as not completed.
      if (entry.status == CellStatus::Ok && !fs::exists(record_path(id))) continue;
      manifest_[id] = entry;
    } catch (const std::logic_error& e) {
      throw InputError("malformed manifest line '" + line + "': " + e.what());
    }
  }
}

void ResultStore::write_manifest() const {
  std::ostringstream out;
  out << kManifestSchema << '\n';
  for (const auto& [id, entry] : manifest_) {
    std::string message = entry.message;
    for (char& c : message) {
      if (c == '\t' || c == '\n') c = ' ';
    }
    out << (entry.status == CellStatus::Ok ? "ok" : "failed") << '\t' << id.algorithm << '\t' << id.dimension
        << '\t' << id.function << '\t' << suite::combo_token(id.combo) << '\t' << id.repetition << '\t'
        << entry.fingerprint << '\t' << message << '\n';
  }
  write_atomically(root_ / "manifest.tsv", out.str());
}

bool ResultStore::is_complete(const CellId& id, const std::string& fingerprint) const {
  std::lock_guard lock(mutex_);
  const auto it = manifest_.find(id);
  return it != manifest_.end() && it->second.status == CellStatus::Ok && it->second.fingerprint == fingerprint;
}

void ResultStore::save(const CellId& id, const CellOutcome& outcome, const std::string& fingerprint) {
  {
    std::ostringstream rec;
    write_record(rec, outcome.record);
    write_atomically(record_path(id), rec.str());
  }
  if (!outcome.trace.empty()) {
    std::ostringstream diag;
    metrics::write_diagnostics_csv(diag, outcome.trace);
    write_atomically(diagnostics_path(id), diag.str());
  }
  if (!outcome.model_dump.empty()) {
    std::ostringstream dump;
    const std::size_t dim = outcome.record.dimension;
    dump << "generation,r2,archive_size";
    for (std::size_t d = 1; d <= dim; ++d) dump << ",center_" << d;
    for (std::size_t k = 0; k < prescreen::df_mm(dim); ++k) dump << ",coef_" << k;
    dump << '\n';
    for (const auto& line : outcome.model_dump) dump << line << '\n';
    write_atomically(model_dump_path(id), dump.str());
  }
  std::lock_guard lock(mutex_);
  manifest_[id] = ManifestEntry{CellStatus::Ok, fingerprint, ""};
  write_manifest();
}

void ResultStore::mark_failed(const CellId& id, const std::string& fingerprint, const std::string& message) {
  std::lock_guard lock(mutex_);
  manifest_[id] = ManifestEntry{CellStatus::Failed, fingerprint, message};
  write_manifest();
}

std::map<CellId, ManifestEntry> ResultStore::manifest() const {
  std::lock_guard lock(mutex_);
  return manifest_;
}

std::vector<metrics::RunRecord> ResultStore::load_records() const {
  std::vector<metrics::RunRecord> out;
  for (const auto& [id, entry] : manifest()) {
    if (entry.status != CellStatus::Ok) continue;
    std::ifstream in(record_path(id));
    if (!in) throw InputError("missing record file '" + record_path(id).string() + "'");
    out.push_back(read_record(in));
  }
  return out;
}

}  // namespace pslshade::harness
