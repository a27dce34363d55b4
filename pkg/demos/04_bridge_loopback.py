"""Drive the simulator over the TCP bridge and compare with the in-process run.

A bridge server is started on an ephemeral loopback port, one seeded
episode is flown through it, and every transition is compared bitwise with
the same episode stepped locally. An external simulator that speaks the
same line-delimited JSON protocol can replace the built-in server, and
``RunConfig(env={"remote": "host:port"})`` trains against it.
"""
import numpy as np

from uavland import LandingEnv
from uavland.bridge import remote_env, start_server

if __name__ == "__main__":
    server = start_server()
    host, port = server.server_address
    print(f"bridge listening on {host}:{port}")
    rng = np.random.default_rng(3)
    local = LandingEnv()
    try:
        with remote_env(f"{host}:{port}") as env:
            env.reset(seed=11)
            local.reset(seed=11)
            while not env.done:
                a = rng.uniform(-1, 1, 2)
                remote, mine = env.step(a), local.step(a)
                assert remote == mine
                print(f"  step {local.steps:2d}  reward {remote.reward:+9.4f}  {remote.termination.value}")
        print("every transition identical to the in-process episode")
    finally:
        server.shutdown()
        server.server_close()
