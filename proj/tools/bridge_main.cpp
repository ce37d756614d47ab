#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hapticsim/bridge.hpp"
#include "hapticsim/core.hpp"
#include "hapticsim/session.hpp"

// Session-protocol transport: either a localhost TCP listener for a live
// scene, or file replay for captured event logs.  Contact events map to
// stimuli via the perception model for the chosen physical prop.

int main(int argc, char** argv) {
    CLI::App app{"Session bridge for the haptic device scheduler"};

    std::string physical = "plywood";
    std::uint64_t max_ms = 5000;
    std::uint64_t refractory_ms = 0;
    std::uint16_t port = 0;
    std::string replay_in, replay_out;
    bool listen_once = false;

    app.add_option("--physical", physical, "physical prop material");
    app.add_option("--max-ms", max_ms, "per-stimulus cap (ms)");
    app.add_option("--refractory-ms", refractory_ms, "hold-off after each stop (ms)");
    auto* listen_opt =
        app.add_option("--listen", port, "TCP port on localhost (0 picks one)");
    app.add_flag("--once", listen_once, "serve a single connection, then exit");
    auto* replay_opt = app.add_option("--replay", replay_in, "replay events from file");
    app.add_option("--out", replay_out, "response file for --replay");

    CLI11_PARSE(app, argc, argv);

    try {
        hapticsim::SchedulerConfig config = hapticsim::SchedulerConfig::mr_bridge();
        config.stimulus_max_ms = max_ms;
        config.refractory_ms = refractory_ms;
        config.mapping = hapticsim::mapping_for_physical(
            hapticsim::material_from_name(physical));

        if (replay_opt->count()) {
            if (replay_out.empty()) {
                throw std::runtime_error("--replay needs --out for the responses");
            }
            const std::size_t n =
                hapticsim::replay_session(replay_in, replay_out, config);
            std::cout << "wrote " << n << " responses to " << replay_out << "\n";
            return 0;
        }
        if (listen_opt->count()) {
            hapticsim::SessionListener listener(port, config);
            std::cout << "listening on 127.0.0.1:" << listener.bound_port()
                      << std::endl;
            if (listen_once) {
                listener.serve_once();
            } else {
                listener.serve_forever();
            }
            return 0;
        }
        throw std::runtime_error("give --listen or --replay");
    } catch (const std::exception& e) {
        std::cerr << "{\"error\":\"" << e.what() << "\"}\n";
        return 1;
    }
}
