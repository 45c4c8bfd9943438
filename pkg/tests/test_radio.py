import numpy as np
import pytest

from ccnsim.radio import (
    EnergyLedger, Message, MessageKind, Radio, RadioConfig, resum_log, tx_energy,
    write_transmission_log,
)
from oracles import in_range_brute


@pytest.mark.parametrize("r, alpha, expected", [(10, 2, 100), (0, 2, 0), (500, 2, 250000)])
def test_tx_energy(r, alpha, expected):
    assert tx_energy(r, alpha) == expected


def test_tx_energy_constant_term():
    assert tx_energy(10, 2, c=5.0) == 105


class Harness:
    def __init__(self, coords, cfg=RadioConfig(), max_range=500.0):
        self.coords = np.asarray(coords, dtype=float)
        self.events = []
        self.delivered = []
        self.radio = Radio(cfg, len(self.coords), max_range, lambda t: self.coords,
                           self.schedule, self.deliver, keep_log=True)

    def schedule(self, t, fn, *args):
        self.events.append((t, fn, args))

    def deliver(self, batch, now):
        self.delivered.append((now, batch))

    def flush(self):
        events, self.events = self.events, []
        for t, fn, args in events:
            fn(*args, t)


def msg(kind=MessageKind.DATA_REQUEST, src=0):
    return Message(kind, src, 1, None)


def test_broadcast_counts():
    h = Harness([(0, 0), (10, 0), (0, 20), (30, 0), (400, 400)])
    got = h.radio.broadcast(0, msg(), 100.0, 1.0)
    assert list(got) == [1, 2, 3]
    led = h.radio.ledger
    assert led.tx[0] == 100.0 ** 2
    assert led.rx.tolist() == [0, 1, 1, 1, 0]
    assert h.radio.messages == 1
    h.flush()
    (when, batch), = h.delivered
    assert when == pytest.approx(1.002)
    assert list(batch[0][1]) == [1, 2, 3]


def test_empty_zone_still_costs():
    R = 500.0
    h = Harness([(0, 0), (R / 4, 0)])
    got = h.radio.broadcast(0, msg(), R / 6, 0.0)
    assert len(got) == 0
    assert h.radio.ledger.tx[0] == (R / 6) ** 2
    assert not h.events


def test_broadcasts_are_additive():
    h = Harness([(0, 0), (10, 0)])
    h.radio.broadcast(0, msg(), 50.0, 0.0)
    once = h.radio.ledger.tx[0]
    h.radio.broadcast(0, msg(), 50.0, 0.0)
    assert h.radio.ledger.tx[0] == 2 * once


def test_range_beyond_max_rejected():
    h = Harness([(0, 0), (10, 0)])
    with pytest.raises(ValueError):
        h.radio.broadcast(0, msg(), 600.0, 0.0)


def test_unicast_only_target_pays():
    h = Harness([(0, 0), (10, 0), (20, 0)])
    assert h.radio.unicast(0, 2, msg(MessageKind.DATA_REPLY), 50.0, 0.0)
    assert h.radio.ledger.rx.tolist() == [0, 0, 1]
    assert not h.radio.unicast(0, 2, msg(MessageKind.DATA_REPLY), 15.0, 0.0)
    assert h.radio.ledger.rx.tolist() == [0, 0, 1]
    assert h.radio.messages == 2


def test_broadcast_many_matches_individual_broadcasts(rng):
    coords = rng.uniform(0, 1000, size=(25, 2))
    a, b = Harness(coords), Harness(coords)
    senders = [3, 7, 11]
    mask = a.radio.broadcast_many(senders, msg(), 300.0, 0.0)
    for s in senders:
        b.radio.broadcast(s, msg(src=s), 300.0, 0.0)
    for k, s in enumerate(senders):
        assert set(np.flatnonzero(mask[k])) == in_range_brute(coords, s, 300.0)
    assert np.array_equal(a.radio.ledger.tx, b.radio.ledger.tx)
    assert np.array_equal(a.radio.ledger.rx, b.radio.ledger.rx)
    assert a.radio.messages == b.radio.messages == 3


def test_unicast_many_matches_unicast(rng):
    coords = rng.uniform(0, 1000, size=(15, 2))
    a, b = Harness(coords), Harness(coords)
    senders = [1, 2, 5, 9]
    ranges = [100.0, 250.0, 500.0, 500.0]
    msgs = [msg(MessageKind.NEIGHBOR_REPLY, s) for s in senders]
    ok = a.radio.unicast_many(senders, 0, msgs, ranges, 0.0)
    for s, m, r in zip(senders, msgs, ranges):
        b.radio.unicast(s, 0, m, r, 0.0)
    assert np.allclose(a.radio.ledger.tx, b.radio.ledger.tx)
    assert np.array_equal(a.radio.ledger.rx, b.radio.ledger.rx)
    assert [t.deliveries for t in a.radio.log] == [int(x) for x in ok]


def test_delivery_sets_match_brute_force_random_topologies():
    gen = np.random.default_rng(99)
    for _ in range(200):
        n = int(gen.integers(2, 30))
        coords = gen.uniform(0, 1000, size=(n, 2))
        h = Harness(coords)
        sender = int(gen.integers(n))
        radius = float(gen.uniform(0, 500))
        got = set(h.radio.broadcast(sender, msg(), radius, 0.0).tolist())
        assert got == in_range_brute(coords, sender, radius)


def test_ledger_idle():
    led = EnergyLedger(2)
    led.accrue_idle(0, 10.0, 0.0)
    assert led.idle[0] == 0
    led.accrue_idle(0, 10.0, 0.1)
    assert led.idle[0] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        led.accrue_idle(0, -1.0, 0.1)


def test_log_resum_and_csv(tmp_path):
    h = Harness([(0, 0), (10, 0), (100, 0)])
    h.radio.broadcast(0, msg(), 50.0, 0.0)
    h.radio.unicast(1, 2, msg(MessageKind.DATA_REPLY, 1), 125.0, 0.5)
    h.radio.broadcast_many([0, 2], msg(), 500.0, 1.0)
    tot = h.radio.ledger.totals()
    re = resum_log(h.radio.log, h.radio.cfg)
    assert re["tx"] == pytest.approx(tot["tx"], rel=1e-12)
    assert re["rx"] == tot["rx"]
    path = tmp_path / "tx.csv"
    write_transmission_log(path, h.radio.log)
    lines = path.read_text().splitlines()
    assert lines[0] == "time,sender,kind,range,deliveries"
    assert len(lines) == 1 + len(h.radio.log)


def test_radio_config_rejects_negative():
    with pytest.raises(ValueError):
        RadioConfig(rx_cost=-1)
    with pytest.raises(ValueError):
        RadioConfig(alpha=1)
