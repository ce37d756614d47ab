#include "hapticsim/session.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "hapticsim/rng.hpp"
#include "hapticsim/textio.hpp"

namespace hapticsim {

std::string_view event_kind_name(EventKind kind) {
    switch (kind) {
        case EventKind::ContactBegin: return "contact_begin";
        case EventKind::ContactEnd: return "contact_end";
        case EventKind::StimulusCmd: return "stimulus_cmd";
        case EventKind::Ack: return "ack";
        case EventKind::Error: return "error";
    }
    throw std::invalid_argument("invalid event kind");
}

EventKind event_kind_from_name(std::string_view name) {
    if (name == "contact_begin") return EventKind::ContactBegin;
    if (name == "contact_end") return EventKind::ContactEnd;
    if (name == "stimulus_cmd") return EventKind::StimulusCmd;
    if (name == "ack") return EventKind::Ack;
    if (name == "error") return EventKind::Error;
    throw ProtocolError("unknown event kind: '" + std::string(name) + "'");
}

namespace {

void check_frame_invariants(const SessionEvent& e, const char* action) {
    if (e.kind == EventKind::StimulusCmd && !e.stimulus) {
        throw ProtocolError(std::string(action) + ": stimulus_cmd requires a stimulus label");
    }
    if (e.kind == EventKind::ContactBegin && !e.material) {
        throw ProtocolError(std::string(action) + ": contact_begin requires a material");
    }
    if (e.stimulus && !is_stimulus_label(*e.stimulus)) {
        throw ProtocolError(std::string(action) + ": unknown stimulus label: '" +
                            *e.stimulus + "'");
    }
}

}  // namespace

std::string encode_event(const SessionEvent& event) {
    check_frame_invariants(event, "encode");
    std::string out = "{\"seq\":" + std::to_string(event.seq) +
                      ",\"t_ms\":" + std::to_string(event.t_ms) + ",\"kind\":\"" +
                      std::string(event_kind_name(event.kind)) + "\"";
    if (event.material) {
        out += ",\"material\":\"";
        out += material_name(*event.material);
        out += '"';
    }
    if (event.stimulus) {
        out += ",\"stimulus\":\"";
        out += *event.stimulus;
        out += '"';
    }
    out += '}';
    return out;
}

SessionEvent decode_event(std::string_view line) {
    nlohmann::json obj;
    try {
        obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw ProtocolError(std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) throw ProtocolError("event must be a JSON object");

    SessionEvent out;
    bool have_seq = false, have_t = false, have_kind = false;
    for (const auto& [key, value] : obj.items()) {
        if (key == "seq") {
            if (!value.is_number_unsigned()) throw ProtocolError("seq: expected a non-negative integer");
            out.seq = value.get<std::uint64_t>();
            have_seq = true;
        } else if (key == "t_ms") {
            if (!value.is_number_unsigned()) throw ProtocolError("t_ms: expected a non-negative integer");
            out.t_ms = value.get<std::uint64_t>();
            have_t = true;
        } else if (key == "kind") {
            if (!value.is_string()) throw ProtocolError("kind: expected a string");
            out.kind = event_kind_from_name(value.get<std::string>());
            have_kind = true;
        } else if (key == "material") {
            if (value.is_null()) continue;
            if (!value.is_string()) throw ProtocolError("material: expected a string");
            try {
                out.material = material_from_name(value.get<std::string>());
            } catch (const std::invalid_argument& e) {
                throw ProtocolError(e.what());
            }
        } else if (key == "stimulus") {
            if (value.is_null()) continue;
            if (!value.is_string()) throw ProtocolError("stimulus: expected a string");
            out.stimulus = value.get<std::string>();
        } else {
            throw ProtocolError("unknown field: '" + key + "'");
        }
    }
    if (!have_seq || !have_t || !have_kind) {
        throw ProtocolError("seq, t_ms and kind are required");
    }
    check_frame_invariants(out, "decode");
    return out;
}

SchedulerConfig SchedulerConfig::experiment() {
    return SchedulerConfig{};
}

SchedulerConfig SchedulerConfig::mr_bridge() {
    SchedulerConfig c;
    c.refractory_ms = 0;
    return c;
}

StimulusScheduler::StimulusScheduler(SchedulerConfig config)
    : config_(std::move(config)) {
    if (config_.stimulus_max_ms == 0) {
        throw std::invalid_argument("stimulus_max_ms must be positive");
    }
}

SessionEvent StimulusScheduler::make_output(std::uint64_t t_ms, EventKind kind) {
    SessionEvent e;
    e.seq = ++out_seq_;
    e.t_ms = t_ms;
    e.kind = kind;
    return e;
}

void StimulusScheduler::start_stimulus(std::uint64_t t_ms, const std::string& label,
                                       std::optional<MaterialId> material,
                                       std::vector<SessionEvent>& out) {
    SessionEvent cmd = make_output(t_ms, EventKind::StimulusCmd);
    cmd.stimulus = label;
    cmd.material = material;
    out.push_back(std::move(cmd));
    active_ = true;
    active_material_ = material;
    stop_due_ms_ = t_ms + config_.stimulus_max_ms;
}

void StimulusScheduler::stop_stimulus(std::uint64_t t_ms, std::vector<SessionEvent>& out) {
    SessionEvent cmd = make_output(t_ms, EventKind::StimulusCmd);
    cmd.stimulus = "N";
    cmd.material = active_material_;
    out.push_back(std::move(cmd));
    active_ = false;
    active_material_.reset();
    refractory_until_ms_ = t_ms + config_.refractory_ms;
}

void StimulusScheduler::flush_due_timeout(std::uint64_t now_ms,
                                          std::vector<SessionEvent>& out) {
    if (active_ && stop_due_ms_ <= now_ms) stop_stimulus(stop_due_ms_, out);
}

std::vector<SessionEvent> StimulusScheduler::on_event(const SessionEvent& event) {
    std::vector<SessionEvent> out;

    if (event.seq <= last_in_seq_) {
        SessionEvent err = make_output(clock_ms_, EventKind::Error);
        err.detail = "out-of-order seq " + std::to_string(event.seq);
        out.push_back(std::move(err));
        return out;
    }
    last_in_seq_ = event.seq;

    flush_due_timeout(event.t_ms, out);
    clock_ms_ = std::max(clock_ms_, event.t_ms);
    const std::uint64_t now = event.t_ms;

    switch (event.kind) {
        case EventKind::ContactBegin: {
            if (!event.material) {
                SessionEvent err = make_output(now, EventKind::Error);
                err.detail = "contact_begin without material";
                out.push_back(std::move(err));
                break;
            }
            const auto it = config_.mapping.find(*event.material);
            const std::string label = it == config_.mapping.end() ? "N" : it->second;
            if (active_ || now < refractory_until_ms_ || label == "N") {
                // Deferred (or nothing to render): acknowledge without acting.
                SessionEvent ack = make_output(now, EventKind::Ack);
                ack.material = event.material;
                out.push_back(std::move(ack));
                break;
            }
            start_stimulus(now, label, event.material, out);
            break;
        }
        case EventKind::ContactEnd: {
            if (active_) {
                stop_stimulus(now, out);
            } else {
                SessionEvent ack = make_output(now, EventKind::Ack);
                ack.material = event.material;
                out.push_back(std::move(ack));
            }
            break;
        }
        case EventKind::StimulusCmd: {
            // Direct request from the operator side.
            const std::string& label = *event.stimulus;
            if (label == "N") {
                if (active_) {
                    stop_stimulus(now, out);
                } else {
                    out.push_back(make_output(now, EventKind::Ack));
                }
            } else if (active_ || now < refractory_until_ms_) {
                SessionEvent ack = make_output(now, EventKind::Ack);
                ack.stimulus = label;
                out.push_back(std::move(ack));
            } else {
                start_stimulus(now, label, event.material, out);
            }
            break;
        }
        case EventKind::Ack:
        case EventKind::Error:
            break;
    }
    return out;
}

std::vector<SessionEvent> StimulusScheduler::on_line(std::string_view line) {
    SessionEvent event;
    try {
        event = decode_event(line);
    } catch (const ProtocolError& e) {
        std::vector<SessionEvent> out;
        SessionEvent err = make_output(clock_ms_, EventKind::Error);
        err.detail = e.what();
        out.push_back(std::move(err));
        return out;
    }
    return on_event(event);
}

std::vector<SessionEvent> StimulusScheduler::poll(std::uint64_t now_ms) {
    std::vector<SessionEvent> out;
    flush_due_timeout(now_ms, out);
    clock_ms_ = std::max(clock_ms_, now_ms);
    return out;
}

std::vector<SessionEvent> StimulusScheduler::finish() {
    std::vector<SessionEvent> out;
    if (active_) stop_stimulus(stop_due_ms_, out);
    return out;
}

std::vector<SessionEvent> schedule(const std::vector<SessionEvent>& events,
                                   const SchedulerConfig& config) {
    StimulusScheduler scheduler(config);
    std::vector<SessionEvent> out;
    for (const auto& e : events) {
        auto replies = scheduler.on_event(e);
        out.insert(out.end(), std::make_move_iterator(replies.begin()),
                   std::make_move_iterator(replies.end()));
    }
    auto tail = scheduler.finish();
    out.insert(out.end(), std::make_move_iterator(tail.begin()),
               std::make_move_iterator(tail.end()));
    return out;
}

std::size_t replay_session(const std::string& in_path, const std::string& out_path,
                           const SchedulerConfig& config) {
    std::ifstream in(in_path);
    if (!in) throw std::runtime_error("cannot open file: " + in_path);
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write file: " + out_path);

    StimulusScheduler scheduler(config);
    std::size_t count = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        for (const auto& e : scheduler.on_line(line)) {
            out << encode_event(e) << '\n';
            ++count;
        }
    }
    for (const auto& e : scheduler.finish()) {
        out << encode_event(e) << '\n';
        ++count;
    }
    if (!out) throw std::runtime_error("write failed: " + out_path);
    return count;
}

std::vector<MaterialId> material_order(int participant) {
    if (participant < 0) throw std::invalid_argument("participant must be non-negative");
    // Balanced 6x6 Latin square (Williams construction): consecutive rows
    // are shifts of one row built by alternating ends, so every material
    // appears once per position and each ordered pair of neighbours at most
    // once across the six rows.
    static const int first_row[6] = {0, 1, 5, 2, 4, 3};
    const int row = participant % 6;
    std::vector<MaterialId> order;
    order.reserve(6);
    for (int i = 0; i < 6; ++i) {
        order.push_back(test_materials()[static_cast<std::size_t>((first_row[i] + row) % 6)]);
    }
    return order;
}

TrialPlan generate_trials(std::uint64_t seed, int participant) {
    if (participant < 0) throw std::invalid_argument("participant must be non-negative");

    TrialPlan plan;
    plan.seed = seed;
    plan.participant = participant;

    Rng rng = Rng(seed).child(static_cast<std::uint64_t>(participant));

    constexpr int kRepetitions = 5;
    constexpr int kBaselineEvery = 6;

    std::vector<std::string> labels;
    for (std::string_view l : stimulus_energy_order()) labels.emplace_back(l);

    int index = 0;
    int since_baseline = 0;
    auto maybe_baseline = [&] {
        if (since_baseline == kBaselineEvery) {
            plan.rows.push_back({index++, MaterialId::Plywood, "N", 0, false, true});
            since_baseline = 0;
        }
    };

    for (MaterialId material : material_order(participant)) {
        for (int rep = 1; rep <= kRepetitions; ++rep) {
            std::vector<std::string> block = labels;
            rng.shuffle(block);
            for (auto& label : block) {
                maybe_baseline();
                plan.rows.push_back(
                    {index++, material, std::move(label), rep, rep == 1, false});
                ++since_baseline;
            }
        }
    }
    maybe_baseline();
    return plan;
}

std::string trials_to_csv(const TrialPlan& plan) {
    std::string out = "index,material,stimulus,repetition,is_training,is_baseline\n";
    for (const auto& r : plan.rows) {
        out += std::to_string(r.index);
        out += ',';
        out += material_name(r.material);
        out += ',';
        out += r.stimulus;
        out += ',';
        out += std::to_string(r.repetition);
        out += ',';
        out += r.is_training ? '1' : '0';
        out += ',';
        out += r.is_baseline ? '1' : '0';
        out += '\n';
    }
    return out;
}

}  // namespace hapticsim
