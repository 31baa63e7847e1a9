#pragma once

namespace dagsim {

/// Access-control protocol parameters. Defaults follow the reference
/// simulation setup: nu=50, DC_max=1, A=0.06, beta=0.5, tau=2, sigma=0.6,
/// epsilon=15, W_BL=5.
struct ProtocolParams {
    double nu = 50.0;       // global writing power, work units / second
    double dc_max = 1.0;    // deficit cap for empty queues (DRR-)
    double A = 0.06;        // global additive increase
    double beta = 0.5;      // multiplicative decrease, in (0,1)
    double tau = 2.0;       // backoff pause, seconds
    double sigma = 0.6;     // post-blacklist rate factor
    double epsilon = 15.0;  // blacklist quiet period, seconds
    double W = 2.0;         // own-queue backoff threshold (work / reputation)
    double W_BL = 5.0;      // blacklisting threshold (work / reputation)
    double inbox_capacity = 500.0;  // work units
    double tx_work = 1.0;
    int parents = 2;             // tips approved per transaction, 1..8
    double max_age = 30.0;       // arrival filter: drop older transactions
    double retry_interval = 1.0; // solidification request retry period
    int solidification_batch = 64;  // max transactions per solidification reply

    bool disable_solidification = false;  // ablation: no gate, no requests
    bool disable_timestamp_order = false; // ablation: FIFO inbox queues
};

}  // namespace dagsim
