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
#ifndef CTRACE_STORE_ENCOUNTER_STORE_H_
#define CTRACE_STORE_ENCOUNTER_STORE_H_

#include <atomic>
#include <chrono>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ctrace/common/random.h"
#include "ctrace/common/time.h"
#include "ctrace/store/exposure.h"
#include "ctrace/tcn/tcn.h"

namespace ctrace::store {

inline constexpr int kMinRssiDbm = -120;
inline constexpr int kMaxRssiDbm = 0;

struct RssiSample {
  UtcTime time;
  int dbm;

  bool operator==(const RssiSample&) const = default;
};

// One observed ceTCN: every sighting of the same TCN inside the same
// ten-minute interval of the same day.
struct EncounterRecord {
  tcn::ContactEventTcn ce_tcn;
  Date date;
  tcn::TimeIntervalNumber tin = tcn::TimeIntervalNumber::FromValidated(0);
  UtcTime first_seen;
  UtcTime last_seen;
  std::vector<RssiSample> rssi_samples;

  std::chrono::milliseconds duration() const { return last_seen - first_seen; }
  double median_rssi() const;
};

class RetentionPolicy {
 public:
  static absl::StatusOr<RetentionPolicy> Create(int window_days);
  static RetentionPolicy Default() { return RetentionPolicy(14); }

  int window_days() const { return window_days_; }
  // Oldest date still inside the window as seen at now.
  Date OldestRetainedDate(UtcTime now) const {
    return DateOf(now) - std::chrono::days(window_days_);
  }

 private:
  explicit RetentionPolicy(int days) : window_days_(days) {}
  int window_days_;
};

struct ReportPayload {
  // Ordered by date, oldest first.
  std::vector<tcn::DailyKey> keys;
};

// Device-side state: the device's own daily keys and everything it has
// observed. One writer at a time; readers take shared locks.
class EncounterStore {
 public:
  explicit EncounterStore(ExposureThresholds thresholds = {});
  EncounterStore(EncounterStore&& other) noexcept;
  EncounterStore& operator=(EncounterStore&&) = delete;

  // Own keys.
  absl::StatusOr<tcn::DailyKey> EnsureKey(Date date, RandomSource& rng);
  absl::StatusOr<tcn::TemporaryContactNumber> OwnTcnAt(UtcTime t,
                                                       RandomSource& rng);
  std::vector<tcn::DailyKey> OwnKeys() const;
  void PutOwnKey(const tcn::DailyKey& key);

  // Observations. Rejects rssi outside [-120, 0] dBm and counts the rejection.
  absl::StatusOr<tcn::ContactEventTcn> RecordSighting(
      const tcn::TemporaryContactNumber& raw_tcn, UtcTime timestamp, int rssi);

  // Deletes records and own keys dated before now - window_days.
  size_t PurgeExpired(UtcTime now, const RetentionPolicy& policy);

  std::map<tcn::ContactEventTcn, ExposureCategory> ClassifyExposures() const;

  absl::StatusOr<ReportPayload> PrepareReport(const RetentionPolicy& window,
                                              UtcTime now) const;

  // Call once the server acknowledged 'reported'. Drops the reported keys and
  // replaces today's key with a fresh one used for all later TCNs.
  absl::StatusOr<tcn::DailyKey> RotateAfterReport(const ReportPayload& reported,
                                                  UtcTime now,
                                                  RandomSource& rng);

  std::vector<EncounterRecord> Records() const;
  std::optional<EncounterRecord> Find(const tcn::ContactEventTcn& ce) const;
  size_t record_count() const;
  uint64_t rejected_sightings() const { return rejected_.load(); }
  const ExposureThresholds& thresholds() const { return thresholds_; }

  // Line-delimited export of the observation records:
  //   ce_tcn_hex <TAB> date <TAB> tin <TAB> first_seen <TAB> last_seen
  //   <TAB> ts@rssi,ts@rssi,...
  std::string ExportRecords() const;
  absl::Status ImportRecords(std::string_view text);

  // Whole-store snapshot encrypted under device_secret.
  absl::Status SaveSealed(const std::string& path,
                          std::span<const uint8_t> device_secret) const;
  static absl::StatusOr<EncounterStore> LoadSealed(
      const std::string& path, std::span<const uint8_t> device_secret);

 private:
  ExposureThresholds thresholds_;
  mutable std::shared_mutex mu_;
  std::map<tcn::ContactEventTcn, EncounterRecord> records_;
  std::map<Date, tcn::DailyKey> own_keys_;
  std::atomic<uint64_t> rejected_{0};
};

}  // namespace ctrace::store

#endif  // CTRACE_STORE_ENCOUNTER_STORE_H_
