"""Teleoperation service: a browser (or any socket client) drives the leader
arm with joint targets while bilateral control couples the follower.

Protocol: one JSON object per line over a plain TCP socket, at most 4 KiB
per line. Client to server:

    {"type": "lead", "q": [5 joint targets, rad]}
    {"type": "start", "object": "tennis"}
    {"type": "stop"}
    {"type": "save"}

Server to client: a "hello" on connect (joint limits, object names, rates),
"state" telemetry at 20 Hz while running, "episode_saved" after a save,
"error" for anything malformed. One session at a time; extra connections
are refused with an error line.

Two pacing modes. Realtime (default) free-runs the control loop at 100 Hz
wall clock. Lockstep advances exactly one control step per inbound message,
which makes a scripted client sequence reproduce an episode byte for byte;
the regression fixtures rely on that.
"""

from __future__ import annotations

import json
import socket
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import N_JOINTS, WorkbenchConfig, as_gain_dict
from .control import BilateralController, JointObservers
from .episodes import Episode, save_episode
from .sim import TaskStage, World

MAX_LINE_BYTES = 4096
TELEMETRY_DIVISOR = 5          # 100 Hz loop -> 20 Hz state messages


def _state_message(world: World, obs_l, obs_f) -> dict:
    rnd = lambda arr: [round(float(v), 9) for v in arr]
    return {
        "type": "state",
        "t": round(world.clock, 9),
        "leader": {"th": rnd(world.leader.theta), "om": rnd(world.leader.omega),
                   "tau": rnd(obs_l.tau_res)},
        "follower": {"th": rnd(world.follower.theta), "om": rnd(world.follower.omega),
                     "tau": rnd(obs_f.tau_res)},
        "grip_force": round(float(world.grip_force), 9),
        "stage": world.status.stage.value,
    }


@dataclass
class _Outbox:
    """Writer-side mailbox: replies are reliable, telemetry is latest-wins."""

    lock: threading.Lock = field(default_factory=threading.Lock)
    replies: list = field(default_factory=list)
    state: dict | None = None
    closed: bool = False

    def put_reply(self, msg: dict) -> None:
        with self.lock:
            self.replies.append(msg)

    def put_state(self, msg: dict) -> None:
        with self.lock:
            self.state = msg

    def drain(self) -> list:
        with self.lock:
            out = self.replies
            self.replies = []
            if self.state is not None:
                out = out + [self.state]
                self.state = None
            return out


class TeleopSession:
    """Single-client session state machine driven by parsed messages.

    Owns the world, controllers and the recording buffer; the caller is
    responsible for invoking handle() and tick() from one thread only.
    """

    def __init__(self, cfg: WorkbenchConfig, out_dir, outbox: _Outbox,
                 seed: int | None = None):
        self.cfg = cfg
        self.out_dir = Path(out_dir)
        self.outbox = outbox
        self.seed = seed
        self.world: World | None = None
        self.running = False
        self.rows: list = []
        self.obj_name = ""
        self.saved = 0
        self._lead_target: np.ndarray | None = None
        self._step_count = 0
        self._tau_l = np.zeros(N_JOINTS)
        self._tau_f = np.zeros(N_JOINTS)
        lo, hi = cfg.arm.theta_min, cfg.arm.theta_max
        self._theta_lo = np.asarray(lo, dtype=float)
        self._theta_hi = np.asarray(hi, dtype=float)

    def hello(self) -> dict:
        return {"type": "hello",
                "theta_min": list(self._theta_lo), "theta_max": list(self._theta_hi),
                "objects": sorted(self.cfg.objects),
                "control_hz": round(1.0 / self.cfg.timing.control_dt),
                "telemetry_hz": round(1.0 / self.cfg.timing.control_dt) // TELEMETRY_DIVISOR}

    def _error(self, msg: str) -> None:
        self.outbox.put_reply({"type": "error", "msg": msg})

    def handle(self, message: dict) -> None:
        kind = message.get("type")
        if kind == "lead":
            self._handle_lead(message)
        elif kind == "start":
            self._handle_start(message)
        elif kind == "stop":
            self.running = False
        elif kind == "save":
            self._handle_save()
        else:
            self._error(f"unknown message type {kind!r}")

    def _handle_lead(self, message: dict) -> None:
        q = message.get("q")
        if (not isinstance(q, list) or len(q) != N_JOINTS
                or not all(isinstance(v, (int, float)) for v in q)):
            self._error(f"lead.q must be {N_JOINTS} numbers")
            return
        q = np.clip(np.asarray(q, dtype=float), self._theta_lo, self._theta_hi)
        self._lead_target = q

    def _handle_start(self, message: dict) -> None:
        name = message.get("object")
        if name not in self.cfg.objects:
            self._error(f"unknown object {name!r}")
            return
        self.obj_name = name
        obj = self.cfg.object(name)
        spawn = np.asarray(self.cfg.layout.pick_center, dtype=float)
        if self.seed is not None and self.cfg.collect.spawn_jitter > 0:
            rng = np.random.default_rng(self.seed + self.saved)
            spawn = spawn + rng.uniform(-self.cfg.collect.spawn_jitter,
                                        self.cfg.collect.spawn_jitter, size=2)
        self.world = World(self.cfg, obj, spawn_xy=spawn)
        dt = self.cfg.timing.control_dt
        self.ctl = BilateralController(self.cfg.gains, dt)
        self.obs_l = JointObservers(self.cfg.gains, dt)
        self.obs_f = JointObservers(self.cfg.gains, dt)
        self.rows = []
        self._step_count = 0
        self._tau_l = np.zeros(N_JOINTS)
        self._tau_f = np.zeros(N_JOINTS)
        self._lead_target = self.world.leader.theta.copy()
        self.running = True

    def _handle_save(self) -> None:
        if not self.rows:
            self._error("nothing recorded; start a session first")
            return
        episode = self._pack()
        path = self.out_dir / f"teleop_{self.saved:03d}_{self.obj_name}.csv"
        save_episode(episode, path)
        self.saved += 1
        self.outbox.put_reply({"type": "episode_saved", "path": str(path)})

    def _pack(self) -> Episode:
        rows = self.rows
        t = np.array([r[0] for r in rows])
        stack = lambda i: np.vstack([r[i] for r in rows])
        meta = {
            "source": "human",
            "object": self.obj_name,
            "seed": self.seed,
            "steps": len(rows),
            "outcome": self.world.status.as_dict(),
            "gains": as_gain_dict(self.cfg.gains),
            "control_dt": self.cfg.timing.control_dt,
        }
        return Episode(t=t, leader_theta=stack(1), leader_omega=stack(2),
                       leader_tau=stack(3), follower_theta=stack(4),
                       follower_omega=stack(5), follower_tau=stack(6), meta=meta)

    def tick(self) -> None:
        """One 10 ms control step: observers, bilateral law, leader servo."""
        if not self.running or self.world is None:
            return
        world = self.world
        t = world.clock
        self.obs_l.update(self._tau_l, world.leader.omega, world.leader.theta)
        self.obs_f.update(self._tau_f, world.follower.omega, world.follower.theta)
        self.rows.append((t,
                          world.leader.theta.copy(), world.leader.omega.copy(),
                          self.obs_l.tau_res.copy(),
                          world.follower.theta.copy(), world.follower.omega.copy(),
                          self.obs_f.tau_res.copy()))
        self._tau_l, self._tau_f = self.ctl.step(
            world.leader.theta, world.follower.theta,
            self.obs_l.tau_res, self.obs_f.tau_res,
            self.obs_l.tau_dis, self.obs_f.tau_dis)

        q_des = self._lead_target
        kp, kd = self.cfg.collect.servo_kp, self.cfg.collect.servo_kd

        def hand_load(theta, omega):
            return -(kp * (q_des - theta) + kd * (0.0 - omega))

        world.step_control(self._tau_l, self._tau_f, hand_load)
        self._step_count += 1
        if self._step_count % TELEMETRY_DIVISOR == 0:
            self.outbox.put_state(_state_message(world, self.obs_l, self.obs_f))
        if world.status.terminal and world.status.stage is not TaskStage.PLACED:
            self.running = False


def _parse_line(raw: bytes):
    if len(raw) > MAX_LINE_BYTES:
        return None, "line exceeds 4096 bytes"
    try:
        msg = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as err:
        return None, f"bad json: {err}"
    if not isinstance(msg, dict):
        return None, "message must be a json object"
    return msg, None


class TeleopServer:
    """Accepts one client at a time and runs its session."""

    def __init__(self, cfg: WorkbenchConfig, out_dir, host: str = "127.0.0.1",
                 port: int = 8765, seed: int | None = None,
                 realtime: bool = True):
        self.cfg = cfg
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.host = host
        self.port = port
        self.seed = seed
        self.realtime = realtime
        self._server_sock: socket.socket | None = None
        self._stop = threading.Event()
        self._busy = threading.Lock()

    def __enter__(self):
        self.start()
        return self

    def __exit__(self, *exc):
        self.shutdown()

    def start(self) -> None:
        sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        sock.bind((self.host, self.port))
        sock.listen(2)
        self.port = sock.getsockname()[1]
        self._server_sock = sock
        self._accept_thread = threading.Thread(target=self._accept_loop, daemon=True)
        self._accept_thread.start()

    def shutdown(self) -> None:
        self._stop.set()
        if self._server_sock is not None:
            try:
                self._server_sock.close()
            except OSError:
                pass

    def serve_forever(self) -> None:
        if self._server_sock is None:
            self.start()
        try:
            while not self._stop.is_set():
                time.sleep(0.2)
        except KeyboardInterrupt:
            pass
        finally:
            self.shutdown()

    def _accept_loop(self) -> None:
        while not self._stop.is_set():
            try:
                conn, _addr = self._server_sock.accept()
            except OSError:
                return
            if not self._busy.acquire(blocking=False):
                try:
                    conn.sendall(b'{"type":"error","msg":"busy: one session at a time"}\n')
                    conn.close()
                except OSError:
                    pass
                continue
            threading.Thread(target=self._run_session, args=(conn,),
                             daemon=True).start()

    def _run_session(self, conn: socket.socket) -> None:
        try:
            self._session_body(conn)
        finally:
            try:
                conn.close()
            except OSError:
                pass
            self._busy.release()

    def _session_body(self, conn: socket.socket) -> None:
        outbox = _Outbox()
        session = TeleopSession(self.cfg, self.out_dir, outbox, seed=self.seed)
        inbox: list = []
        inbox_lock = threading.Lock()
        disconnected = threading.Event()

        def reader():
            buf = b""
            while not self._stop.is_set():
                try:
                    chunk = conn.recv(4096)
                except OSError:
                    break
                if not chunk:
                    break
                buf += chunk
                while b"\n" in buf:
                    raw, buf = buf.split(b"\n", 1)
                    if not raw.strip():
                        continue
                    msg, err = _parse_line(raw)
                    with inbox_lock:
                        inbox.append((msg, err))
            disconnected.set()

        def send_batch(batch) -> None:
            if not batch:
                return
            try:
                conn.sendall(b"".join(
                    (json.dumps(m, separators=(",", ":")) + "\n").encode()
                    for m in batch))
            except OSError:
                disconnected.set()

        def writer():
            while True:
                batch = outbox.drain()
                if not batch:
                    if disconnected.is_set():
                        return
                    time.sleep(0.005)
                    continue
                send_batch(batch)
                if disconnected.is_set():
                    return

        outbox.put_reply(session.hello())
        threading.Thread(target=reader, daemon=True).start()
        if self.realtime:
            # An async writer decouples a slow client from the control
            # clock; the outbox coalesces telemetry it cannot keep up with.
            threading.Thread(target=writer, daemon=True).start()
        else:
            send_batch(outbox.drain())

        dt = self.cfg.timing.control_dt
        next_deadline = time.perf_counter() + dt
        while not self._stop.is_set() and not disconnected.is_set():
            with inbox_lock:
                pending, inbox[:] = list(inbox), []
            stepped = 0
            for msg, err in pending:
                if err is not None:
                    outbox.put_reply({"type": "error", "msg": err})
                else:
                    session.handle(msg)
                if not self.realtime:
                    # Lockstep clients own the clock: flush after every tick
                    # so no telemetry frame can coalesce or overtake a reply.
                    session.tick()
                    send_batch(outbox.drain())
                    stepped += 1
            if self.realtime:
                now = time.perf_counter()
                while next_deadline <= now:
                    session.tick()
                    next_deadline += dt
                time.sleep(min(0.002, max(0.0, next_deadline - time.perf_counter())))
            elif stepped == 0:
                time.sleep(0.001)

        if session.running and session.rows:
            print("teleop: client left mid-episode; recording discarded")


def serve_teleop(cfg: WorkbenchConfig, out_dir, host: str = "127.0.0.1",
                 port: int = 8765, seed: int | None = None,
                 realtime: bool = True) -> TeleopServer:
    """Construct and start a teleop server; caller owns shutdown."""
    server = TeleopServer(cfg, out_dir, host=host, port=port, seed=seed,
                          realtime=realtime)
    server.start()
    return server


__all__ = ["TeleopServer", "TeleopSession", "serve_teleop", "MAX_LINE_BYTES",
           "TELEMETRY_DIVISOR"]
