#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hapticsim/core.hpp"

namespace hapticsim {

// ---------------------------------------------------------------------------
// Session protocol.
//
// One JSON object per line, fields in the fixed order
// {"seq","t_ms","kind","material","stimulus"}; material/stimulus appear only
// when the event carries them.  The same frame shape travels both ways:
// contact events arrive from the scene, stimulus commands and
// acknowledgements go back.
// ---------------------------------------------------------------------------

enum class EventKind { ContactBegin, ContactEnd, StimulusCmd, Ack, Error };

std::string_view event_kind_name(EventKind kind);
EventKind event_kind_from_name(std::string_view name);

struct SessionEvent {
    std::uint64_t seq = 0;
    std::uint64_t t_ms = 0;
    EventKind kind = EventKind::Ack;
    std::optional<MaterialId> material;
    std::optional<std::string> stimulus;  // canonical label; "N" commands a stop
    // Local diagnostic for Error events; never serialized.
    std::string detail;
};

struct ProtocolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Canonical single-line encoding (no trailing newline).  Enforces the frame
// invariants: a stimulus command carries a stimulus label, a contact-begin
// carries a material.
std::string encode_event(const SessionEvent& event);

// Accepts any field order; unknown fields, bad types, unknown names, or
// missing invariant fields raise ProtocolError.
SessionEvent decode_event(std::string_view line);

// ---------------------------------------------------------------------------
// Stimulus scheduler.
//
// Turns the contact stream into stimulus commands under the session safety
// rules: one stimulus at a time, a hard per-stimulus timeout, and a
// refractory hold after each stop before the next stimulus may begin.
// Requests that cannot run right now are answered with an Ack and dropped
// (the scene will send a fresh contact when it matters again).
// ---------------------------------------------------------------------------

struct SchedulerConfig {
    std::uint64_t stimulus_max_ms = 5000;
    std::uint64_t refractory_ms = 5000;
    std::map<MaterialId, std::string> mapping;  // material -> stimulus label

    // Measurement sessions space stimuli out; the interactive bridge only
    // keeps the per-stimulus cap.
    static SchedulerConfig experiment();
    static SchedulerConfig mr_bridge();
};

class StimulusScheduler {
public:
    explicit StimulusScheduler(SchedulerConfig config);

    // Feeds one event; returns the responses it provoked (possibly including
    // a timeout stop that came due earlier on the event clock).
    std::vector<SessionEvent> on_event(const SessionEvent& event);

    // Feeds one raw line; malformed input yields an Error response instead
    // of throwing, so one bad frame never kills the stream.
    std::vector<SessionEvent> on_line(std::string_view line);

    // Advances the clock without an event, emitting the timeout stop if it
    // is due.  For callers that own a tick loop rather than an event stream.
    std::vector<SessionEvent> poll(std::uint64_t now_ms);

    // Flushes the pending timeout stop, if any.
    std::vector<SessionEvent> finish();

    bool stimulus_active() const { return active_; }

private:
    SessionEvent make_output(std::uint64_t t_ms, EventKind kind);
    void start_stimulus(std::uint64_t t_ms, const std::string& label,
                        std::optional<MaterialId> material,
                        std::vector<SessionEvent>& out);
    void stop_stimulus(std::uint64_t t_ms, std::vector<SessionEvent>& out);
    void flush_due_timeout(std::uint64_t now_ms, std::vector<SessionEvent>& out);

    SchedulerConfig config_;
    std::uint64_t out_seq_ = 0;
    std::uint64_t last_in_seq_ = 0;
    std::uint64_t clock_ms_ = 0;
    bool active_ = false;
    std::uint64_t stop_due_ms_ = 0;
    std::uint64_t refractory_until_ms_ = 0;
    std::optional<MaterialId> active_material_;
};

// Runs a whole event list through a fresh scheduler, then finish().
std::vector<SessionEvent> schedule(const std::vector<SessionEvent>& events,
                                   const SchedulerConfig& config);

// Replays an NDJSON event file through the scheduler and writes the response
// stream; returns the number of responses.
std::size_t replay_session(const std::string& in_path, const std::string& out_path,
                           const SchedulerConfig& config);

// ---------------------------------------------------------------------------
// Trial plan generation.
//
// Each participant rates 6 materials x 7 stimuli x 5 repetitions.  Material
// order comes from a balanced 6x6 Latin square indexed by participant;
// stimulus order is a fresh seeded shuffle per repetition block.  The first
// repetition of each material is training.  After every 6 trials a bare
// reference rating (plywood, no stimulus) re-anchors the scale.
// ---------------------------------------------------------------------------

struct TrialRow {
    int index = 0;
    MaterialId material = MaterialId::Plywood;
    std::string stimulus = "N";
    int repetition = 0;     // 1..5 for measurements, 0 for baseline rows
    bool is_training = false;
    bool is_baseline = false;
};

struct TrialPlan {
    std::uint64_t seed = 0;
    int participant = 0;
    std::vector<TrialRow> rows;
};

// Row `participant % 6` of the balanced Latin square, as material order.
std::vector<MaterialId> material_order(int participant);

TrialPlan generate_trials(std::uint64_t seed, int participant);

// CSV with header index,material,stimulus,repetition,is_training,is_baseline.
std::string trials_to_csv(const TrialPlan& plan);

}  // namespace hapticsim
