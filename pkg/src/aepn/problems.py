"""Benchmark nets for the three task-assignment problems.

All three run over a horizon of 10 time units and reward the budget of the
task being assigned:

* ``p1``: one resource, one type-0 (budget 100) and one type-1 (budget 200)
  task arriving each time unit, unit completion time.  Finite color space.
* ``p2``: as p1, budgets sampled uniformly (70-130 and 170-230, two
  decimals).  Finite color space via unit-wide budget buckets.
* ``p3``: Poisson arrivals (rate 1 per type), Gaussian budgets (means 100
  and 200, std 10), exponentially distributed acceptance windows (mean 2)
  after which tasks expire, and two resources with configurable processing
  times (default 1.0 and 2.0).  Continuous attributes: no finite color
  space, so only the graph interface applies.

Builders return a template net (tag E, clock 0); cloning and reseeding it
yields independent episodes.
"""
from __future__ import annotations

from .net import MarkedAEPN, build_net


def _flow_arcs() -> list[dict]:
    # waiting task + free resource -> busy task + delayed resource return
    return [
        {"source": "waiting", "target": "start"},
        {"source": "resources", "target": "start"},
        {"source": "start", "target": "busy",
         "expr": {"kind": "identity", "from": "waiting", "delay": 1.0}},
        {"source": "start", "target": "resources",
         "expr": {"kind": "identity", "from": "resources", "delay": 1.0}},
    ]


def build_problem1(horizon: float = 10.0) -> MarkedAEPN:
    spec = {
        "places": [
            {"id": "waiting", "schema": ["type", "budget"]},
            {"id": "resources", "schema": []},
            {"id": "busy", "schema": ["type", "budget"]},
            {"id": "arrival", "schema": []},
        ],
        "transitions": [
            {"id": "start", "tag": "A", "reward": "waiting.budget"},
            {"id": "arrive", "tag": "E", "reward": 0.0},
        ],
        "arcs": _flow_arcs() + [
            {"source": "arrival", "target": "arrive"},
            {"source": "arrive", "target": "arrival",
             "expr": {"kind": "identity", "delay": 1.0}},
            {"source": "arrive", "target": "waiting",
             "expr": {"kind": "emit", "attrs": {"type": 0, "budget": 100}}},
            {"source": "arrive", "target": "waiting",
             "expr": {"kind": "emit", "attrs": {"type": 1, "budget": 200}}},
        ],
        "initial_marking": {
            "arrival": [{"time": 0.0, "attrs": {}}],
            "resources": [{"time": 0.0, "attrs": {}}],
        },
        "tag": "E",
        "horizon": horizon,
        "color_spec": {
            "waiting": [{"type": 0, "budget": 100}, {"type": 1, "budget": 200}],
            "resources": [{}],
            "busy": [{"type": 0, "budget": 100}, {"type": 1, "budget": 200}],
            "arrival": [{}],
        },
    }
    return build_net(spec)


def _cent_buckets(kind: int, low: int, high: int) -> list[dict]:
    # budgets are rounded to two decimals, so the color set is the exact
    # hundredth grid over the sampling range
    return [{"type": kind, "budget": (low * 100 + k) / 100.0}
            for k in range((high - low) * 100 + 1)]


def build_problem2(horizon: float = 10.0) -> MarkedAEPN:
    task_buckets = _cent_buckets(0, 70, 130) + _cent_buckets(1, 170, 230)
    spec = {
        "places": [
            {"id": "waiting", "schema": ["type", "budget"]},
            {"id": "resources", "schema": []},
            {"id": "busy", "schema": ["type", "budget"]},
            {"id": "arrival", "schema": []},
        ],
        "transitions": [
            {"id": "start", "tag": "A", "reward": "waiting.budget"},
            {"id": "arrive", "tag": "E", "reward": 0.0},
        ],
        "arcs": _flow_arcs() + [
            {"source": "arrival", "target": "arrive"},
            {"source": "arrive", "target": "arrival",
             "expr": {"kind": "identity", "delay": 1.0}},
            {"source": "arrive", "target": "waiting",
             "expr": {"kind": "emit", "attrs": {
                 "type": 0,
                 "budget": {"dist": "uniform", "low": 70, "high": 130, "round": 2}}}},
            {"source": "arrive", "target": "waiting",
             "expr": {"kind": "emit", "attrs": {
                 "type": 1,
                 "budget": {"dist": "uniform", "low": 170, "high": 230, "round": 2}}}},
        ],
        "initial_marking": {
            "arrival": [{"time": 0.0, "attrs": {}}],
            "resources": [{"time": 0.0, "attrs": {}}],
        },
        "tag": "E",
        "horizon": horizon,
        "color_spec": {
            "waiting": task_buckets,
            "resources": [{}],
            "busy": task_buckets,
            "arrival": [{}],
        },
    }
    return build_net(spec)


def build_problem3(horizon: float = 10.0,
                   proc_times: tuple[float, float] = (1.0, 2.0)) -> MarkedAEPN:
    # combined service capacity (1/1 + 1/2 = 1.5 tasks per unit) sits below
    # the arrival load of 2 per unit, so queues build, acceptance windows
    # bind, and the choice of task and resource actually matters
    def task_stream(kind: int, mean_budget: float) -> list[dict]:
        return [
            {"source": f"spawn{kind}", "target": f"arrive{kind}"},
            {"source": f"arrive{kind}", "target": f"spawn{kind}",
             "expr": {"kind": "identity", "delay": {"dist": "exponential", "rate": 1.0}}},
            {"source": f"arrive{kind}", "target": "waiting",
             "expr": {"kind": "emit", "attrs": {
                 "type": kind,
                 "budget": {"dist": "normal", "mean": mean_budget, "std": 10},
                 "window_end": {"dist": "exponential", "rate": 0.5, "plus_clock": True}}}},
        ]

    spec = {
        "places": [
            {"id": "waiting", "schema": ["type", "budget", "window_end"]},
            {"id": "resources", "schema": ["proc_time"]},
            {"id": "spawn0", "schema": []},
            {"id": "spawn1", "schema": []},
        ],
        "transitions": [
            {"id": "start", "tag": "A", "reward": "waiting.budget"},
            {"id": "arrive0", "tag": "E", "reward": 0.0},
            {"id": "arrive1", "tag": "E", "reward": 0.0},
            {"id": "expire", "tag": "E", "reward": 0.0,
             "guard": "clock > waiting.window_end"},
        ],
        "arcs": [
            # the started task is absorbed; occupancy shows on the resource
            # token, whose availability time moves proc_time into the future
            {"source": "waiting", "target": "start"},
            {"source": "resources", "target": "start"},
            {"source": "start", "target": "resources",
             "expr": {"kind": "identity", "from": "resources",
                      "delay": "resources.proc_time"}},
            {"source": "waiting", "target": "expire"},
        ] + task_stream(0, 100) + task_stream(1, 200),
        "initial_marking": {
            "spawn0": [{"time": 0.0, "attrs": {}}],
            "spawn1": [{"time": 0.0, "attrs": {}}],
            "resources": [
                {"time": 0.0, "attrs": {"proc_time": proc_times[0]}},
                {"time": 0.0, "attrs": {"proc_time": proc_times[1]}},
            ],
        },
        "tag": "E",
        "horizon": horizon,
    }
    return build_net(spec)


PROBLEMS = {
    "p1": build_problem1,
    "p2": build_problem2,
    "p3": build_problem3,
}


def build_problem(name: str, horizon: float = 10.0) -> MarkedAEPN:
    try:
        return PROBLEMS[name](horizon)
    except KeyError:
        raise ValueError(f"unknown problem {name!r}; choose from {sorted(PROBLEMS)}") from None
