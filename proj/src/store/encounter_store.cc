// Copyright 2026 The ctrace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "ctrace/store/encounter_store.h"

#include <algorithm>
#include <mutex>
#include <sstream>

#include "ctrace/common/status_macros.h"
#include "ctrace/common/text.h"
#include "ctrace/store/sealed_file.h"
#include "json.hpp"

namespace ctrace::store {

using tcn::ContactEventTcn;
using tcn::DailyKey;
using tcn::TemporaryContactNumber;

double EncounterRecord::median_rssi() const {
  std::vector<int> dbm;
  dbm.reserve(rssi_samples.size());
  for (const auto& s : rssi_samples) dbm.push_back(s.dbm);
  return MedianRssi(dbm);
}

absl::StatusOr<RetentionPolicy> RetentionPolicy::Create(int window_days) {
  if (window_days != 14 && window_days != 21) {
    return absl::InvalidArgumentError("retention window must be 14 or 21 days");
  }
  return RetentionPolicy(window_days);
}

EncounterStore::EncounterStore(ExposureThresholds thresholds)
    : thresholds_(thresholds) {}

EncounterStore::EncounterStore(EncounterStore&& other) noexcept
    : thresholds_(other.thresholds_),
      records_(std::move(other.records_)),
      own_keys_(std::move(other.own_keys_)),
      rejected_(other.rejected_.load()) {}

absl::StatusOr<DailyKey> EncounterStore::EnsureKey(Date date,
                                                   RandomSource& rng) {
  std::unique_lock lock(mu_);
  auto it = own_keys_.find(date);
  if (it != own_keys_.end()) return it->second;
  ASSIGN_OR_RETURN(DailyKey key, tcn::GenerateDailyKey(date, rng));
  own_keys_.emplace(date, key);
  return key;
}

absl::StatusOr<TemporaryContactNumber> EncounterStore::OwnTcnAt(
    UtcTime t, RandomSource& rng) {
  ASSIGN_OR_RETURN(DailyKey key, EnsureKey(DateOf(t), rng));
  return tcn::DeriveTcn(key, tcn::TinOf(t));
}

std::vector<DailyKey> EncounterStore::OwnKeys() const {
  std::shared_lock lock(mu_);
  std::vector<DailyKey> out;
  for (const auto& [date, key] : own_keys_) out.push_back(key);
  return out;
}

void EncounterStore::PutOwnKey(const DailyKey& key) {
  std::unique_lock lock(mu_);
  own_keys_.insert_or_assign(key.date(), key);
}

absl::StatusOr<ContactEventTcn> EncounterStore::RecordSighting(
    const TemporaryContactNumber& raw_tcn, UtcTime timestamp, int rssi) {
  if (rssi < kMinRssiDbm || rssi > kMaxRssiDbm) {
    rejected_.fetch_add(1);
    return absl::InvalidArgumentError("rssi " + std::to_string(rssi) +
                                      " dBm outside [-120, 0]");
  }
  Date date = DateOf(timestamp);
  auto tin = tcn::TinOf(timestamp);
  ContactEventTcn ce = tcn::ComputeContactEventTcn(raw_tcn, date, tin);

  std::unique_lock lock(mu_);
  auto [it, inserted] = records_.try_emplace(ce);
  EncounterRecord& rec = it->second;
  if (inserted) {
    rec.ce_tcn = ce;
    rec.date = date;
    rec.tin = tin;
    rec.first_seen = timestamp;
    rec.last_seen = timestamp;
  } else {
    rec.first_seen = std::min(rec.first_seen, timestamp);
    rec.last_seen = std::max(rec.last_seen, timestamp);
  }
  rec.rssi_samples.push_back({timestamp, rssi});
  return ce;
}

size_t EncounterStore::PurgeExpired(UtcTime now,
                                    const RetentionPolicy& policy) {
  Date oldest = policy.OldestRetainedDate(now);
  std::unique_lock lock(mu_);
  size_t purged = std::erase_if(
      records_, [&](const auto& kv) { return kv.second.date < oldest; });
  purged += std::erase_if(own_keys_,
                          [&](const auto& kv) { return kv.first < oldest; });
  return purged;
}

std::map<ContactEventTcn, ExposureCategory> EncounterStore::ClassifyExposures()
    const {
  std::shared_lock lock(mu_);
  std::map<ContactEventTcn, ExposureCategory> out;
  for (const auto& [ce, rec] : records_) {
    out.emplace(ce, ClassifyExposure(rec.duration(), rec.median_rssi(),
                                     thresholds_));
  }
  return out;
}

absl::StatusOr<ReportPayload> EncounterStore::PrepareReport(
    const RetentionPolicy& window, UtcTime now) const {
  Date today = DateOf(now);
  Date first = today - std::chrono::days(window.window_days() - 1);
  ReportPayload payload;
  std::shared_lock lock(mu_);
  for (const auto& [date, key] : own_keys_) {
    if (date >= first && date <= today) payload.keys.push_back(key);
  }
  if (payload.keys.empty()) {
    return absl::FailedPreconditionError("nothing to report");
  }
  return payload;
}

absl::StatusOr<DailyKey> EncounterStore::RotateAfterReport(
    const ReportPayload& reported, UtcTime now, RandomSource& rng) {
  ASSIGN_OR_RETURN(DailyKey fresh, tcn::GenerateDailyKey(DateOf(now), rng));
  std::unique_lock lock(mu_);
  for (const auto& key : reported.keys) {
    auto it = own_keys_.find(key.date());
    if (it != own_keys_.end() && it->second == key) own_keys_.erase(it);
  }
  own_keys_.insert_or_assign(fresh.date(), fresh);
  return fresh;
}

std::vector<EncounterRecord> EncounterStore::Records() const {
  std::shared_lock lock(mu_);
  std::vector<EncounterRecord> out;
  out.reserve(records_.size());
  for (const auto& [ce, rec] : records_) out.push_back(rec);
  return out;
}

std::optional<EncounterRecord> EncounterStore::Find(
    const ContactEventTcn& ce) const {
  std::shared_lock lock(mu_);
  auto it = records_.find(ce);
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

size_t EncounterStore::record_count() const {
  std::shared_lock lock(mu_);
  return records_.size();
}

std::string EncounterStore::ExportRecords() const {
  std::shared_lock lock(mu_);
  std::ostringstream out;
  for (const auto& [ce, rec] : records_) {
    out << ce.Hex() << '\t' << FormatIsoDate(rec.date) << '\t'
        << rec.tin.value() << '\t' << FormatIsoTimestamp(rec.first_seen)
        << '\t' << FormatIsoTimestamp(rec.last_seen) << '\t';
    for (size_t i = 0; i < rec.rssi_samples.size(); ++i) {
      if (i) out << ',';
      out << FormatIsoTimestamp(rec.rssi_samples[i].time) << '@'
          << rec.rssi_samples[i].dbm;
    }
    out << '\n';
  }
  return out.str();
}

namespace {

absl::StatusOr<EncounterRecord> ParseRecordLine(std::string_view line) {
  std::vector<std::string_view> fields = SplitOn(line, '\t');
  if (fields.size() != 6) {
    return absl::InvalidArgumentError("expected 6 tab-separated fields");
  }
  EncounterRecord rec;
  ASSIGN_OR_RETURN(rec.ce_tcn, ContactEventTcn::FromHex(fields[0]));
  ASSIGN_OR_RETURN(rec.date, ParseIsoDate(fields[1]));
  int tin_value;
  if (!ParseNumber(fields[2], &tin_value)) {
    return absl::InvalidArgumentError("bad interval number");
  }
  ASSIGN_OR_RETURN(rec.tin, tcn::TimeIntervalNumber::Create(tin_value));
  ASSIGN_OR_RETURN(rec.first_seen, ParseIsoTimestamp(fields[3]));
  ASSIGN_OR_RETURN(rec.last_seen, ParseIsoTimestamp(fields[4]));
  for (std::string_view item : SplitOn(fields[5], ',')) {
    size_t at = item.rfind('@');
    if (at == std::string_view::npos) {
      return absl::InvalidArgumentError("bad rssi sample");
    }
    RssiSample s;
    ASSIGN_OR_RETURN(s.time, ParseIsoTimestamp(item.substr(0, at)));
    if (!ParseNumber(item.substr(at + 1), &s.dbm)) {
      return absl::InvalidArgumentError("bad rssi value");
    }
    rec.rssi_samples.push_back(s);
  }
  // Invariants of a well-formed record.
  UtcTime window_start = rec.tin.StartOn(rec.date);
  UtcTime window_end = window_start + std::chrono::seconds(tcn::kIntervalSeconds);
  if (rec.first_seen > rec.last_seen || rec.first_seen < window_start ||
      rec.last_seen >= window_end) {
    return absl::InvalidArgumentError("sighting times outside the interval");
  }
  for (const auto& s : rec.rssi_samples) {
    if (s.time < rec.first_seen || s.time > rec.last_seen ||
        s.dbm < kMinRssiDbm || s.dbm > kMaxRssiDbm) {
      return absl::InvalidArgumentError("rssi sample violates record bounds");
    }
  }
  return rec;
}

}  // namespace

absl::Status EncounterStore::ImportRecords(std::string_view text) {
  std::vector<EncounterRecord> parsed;
  int line_no = 0;
  for (std::string_view line : SplitOn(text, '\n')) {
    ++line_no;
    if (line.empty()) continue;
    auto rec = ParseRecordLine(line);
    if (!rec.ok()) {
      return absl::InvalidArgumentError("line " + std::to_string(line_no) +
                                        ": " + std::string(rec.status().message()));
    }
    parsed.push_back(*std::move(rec));
  }
  std::unique_lock lock(mu_);
  for (auto& rec : parsed) {
    auto [it, inserted] = records_.try_emplace(rec.ce_tcn, rec);
    if (!inserted) {
      EncounterRecord& existing = it->second;
      existing.first_seen = std::min(existing.first_seen, rec.first_seen);
      existing.last_seen = std::max(existing.last_seen, rec.last_seen);
      existing.rssi_samples.insert(existing.rssi_samples.end(),
                                   rec.rssi_samples.begin(),
                                   rec.rssi_samples.end());
    }
  }
  return absl::OkStatus();
}

absl::Status EncounterStore::SaveSealed(
    const std::string& path, std::span<const uint8_t> device_secret) const {
  nlohmann::json doc;
  {
    std::shared_lock lock(mu_);
    nlohmann::json keys = nlohmann::json::array();
    for (const auto& [date, key] : own_keys_) {
      keys.push_back({{"date", FormatIsoDate(date)}, {"key", key.Hex()}});
    }
    doc["keys"] = std::move(keys);
    doc["rejected"] = rejected_.load();
  }
  doc["records"] = ExportRecords();
  std::string plain = doc.dump();
  SecureRandom rng;
  absl::Status st = WriteSealedFile(path, device_secret, AsBytes(plain), rng);
  SecureWipe(std::span<uint8_t>(reinterpret_cast<uint8_t*>(plain.data()),
                                plain.size()));
  return st;
}

absl::StatusOr<EncounterStore> EncounterStore::LoadSealed(
    const std::string& path, std::span<const uint8_t> device_secret) {
  ASSIGN_OR_RETURN(Bytes plain, ReadSealedFile(path, device_secret));
  nlohmann::json doc = nlohmann::json::parse(plain.begin(), plain.end(),
                                             nullptr, false);
  SecureWipe(plain);
  if (doc.is_discarded() || !doc.is_object()) {
    return absl::DataLossError("store snapshot is not valid JSON");
  }
  EncounterStore store;
  for (const auto& k : doc.value("keys", nlohmann::json::array())) {
    ASSIGN_OR_RETURN(Date date, ParseIsoDate(k.value("date", "")));
    ASSIGN_OR_RETURN(auto bytes,
                     HexDecodeFixed<tcn::kDailyKeySize>(k.value("key", "")));
    store.own_keys_.emplace(date, DailyKey(date, bytes));
  }
  store.rejected_ = doc.value("rejected", uint64_t{0});
  RETURN_IF_ERROR(store.ImportRecords(doc.value("records", "")));
  return store;
}

}  // namespace ctrace::store
