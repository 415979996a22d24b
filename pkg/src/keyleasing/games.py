"""
Security experiments

Every runner plays ``trials`` independent trials, each with its own scheme instance,
registry and two random streams (challenger and adversary) derived from the per-trial
seed, and aggregates the records in trial order into a :class:`GameReport`.
"""
from concurrent.futures import ThreadPoolExecutor
from logging import getLogger
from typing import Callable, Dict, List, Optional

from .adversaries import ADVERSARIES, Adversary, AdversaryView
from .bits import Bits
from .config import (
    AdversaryName,
    GameName,
    RunConfig,
    SchemeName,
    SchemeParams,
)
from .exceptions import GameError
from .functions import raise_exception_if_width_differs
from .rng import RandomStream, random_bit, stream, trial_seed
from .schemes import IssuedKey, SkeCrSklScheme, make_scheme, skecd_roundtrip
from .transcript import GameReport, GameTranscript, TrialRecord, Verdict
from . import skecd, skecrskl

logger = getLogger(f"{__package__}.{__name__}")

AdversaryFactory = Callable[[RandomStream], Adversary]
CHALLENGER = "challenger"
ADVERSARY = "adversary"


def adversary_factory(name: AdversaryName) -> AdversaryFactory:
    if name not in ADVERSARIES:
        raise GameError(f"No adversary '{name}'")
    return ADVERSARIES[name]


def _streams(record: TrialRecord):
    return stream(record.seed, CHALLENGER), stream(record.seed, ADVERSARY)


def _play_all(
    game: GameName,
    scheme: SchemeName,
    params: SchemeParams,
    trials: int,
    seed: int,
    threads: int,
    play: Callable[[TrialRecord], None],
    extra: Optional[Dict[str, int]] = None,
) -> GameReport:
    records = [TrialRecord(i, trial_seed(seed, i)) for i in range(trials)]

    def run_one(record: TrialRecord) -> TrialRecord:
        play(record)
        logger.debug(f"{game.value} trial {record.index}: {record.verdict}")
        return record

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(run_one, records))
    else:
        records = [run_one(record) for record in records]

    described = {**params.describe(), **(extra or {})}
    report = GameReport(
        GameTranscript(game.value, scheme.value, described, seed, records)
    )
    low, high = report.ci95
    logger.info(
        f"{game.value} on {scheme.value}: {report.wins}/{report.trials} wins, "
        f"{report.aborts} aborts, 95% interval [{low:.3f}, {high:.3f}]"
    )
    return report


def _challenge_pair(adversary: Adversary, width: int):
    m0, m1 = adversary.choose_challenge()
    raise_exception_if_width_differs(m0, width, "challenge message m0")
    raise_exception_if_width_differs(m1, width, "challenge message m1")
    return m0, m1


def run_kla(
    scheme_name: SchemeName,
    params: SchemeParams,
    adversary_factory: AdversaryFactory,
    q: int,
    trials: int,
    seed: int,
    *,
    game: GameName = GameName.IND_KLA,
    threads: int = 1,
) -> GameReport:
    """
    Key leasing experiment shared by OT-IND-KLA, IND-KLA and the selective ABE games

    The adversary receives q keys and may return them (or deletion certificates); a
    key's flag V_i turns ⊤ once a return verifies. The challenge is only released
    when every key that can decrypt it (all keys outside ABE) has V_i = ⊤, otherwise
    the trial is an abort and counts as a loss. ABE keys are issued once per
    attribute and post-challenge requests for decrypting attributes are refused.
    """

    def play(record: TrialRecord) -> None:
        challenger, adversary_rng = _streams(record)
        scheme = make_scheme(scheme_name, params, challenger)
        adversary = adversary_factory(adversary_rng)

        def encrypt(m: Bits, target=None):
            return scheme.encrypt(m, challenger, target)

        oracle = encrypt if scheme.public_encryption else None
        adversary.bind(AdversaryView(scheme.message_width, scheme, oracle))

        target = adversary.choose_target() if scheme.attribute_based else None
        record.log(ADVERSARY, "target", target)
        issued: List[IssuedKey] = []
        vks = []
        attributes = set()
        for attribute in adversary.key_requests(q, target):
            if scheme.attribute_based:
                if attribute is None or attribute in attributes:
                    record.log(CHALLENGER, "refuse-key", attribute)
                    continue
                attributes.add(attribute)
            key, vk, public = scheme.issue(challenger, attribute)
            issued.append(IssuedKey(len(issued), key, attribute, public))
            vks.append(vk)
            record.log(CHALLENGER, "key", scheme.key_state(key))
        flags = [False] * len(issued)

        for index, returned in adversary.on_keys(issued):
            if not 0 <= index < len(issued) or flags[index]:
                record.log(CHALLENGER, "ignore-return", index)
                continue
            accepted = scheme.check_return(vks[index], returned, challenger)
            flags[index] = accepted
            record.log(CHALLENGER, "verify", (index, accepted))
            adversary.on_verify_result(index, accepted)

        required = [
            key.index
            for key in issued
            if key.attribute is None or scheme.relation(target, key.attribute) == 0
        ]
        verified = all(flags[i] for i in required)
        record.flags = flags
        record.checks["verified"] = verified
        if not verified:
            record.log(CHALLENGER, "abort", [i for i in required if not flags[i]])
            record.verdict = Verdict.ABORT
            return

        m0, m1 = _challenge_pair(adversary, scheme.message_width)
        coin = random_bit(challenger)
        ct = scheme.encrypt(m1 if coin else m0, challenger, target)
        record.log(CHALLENGER, "challenge", ct)

        for attribute in adversary.post_challenge_requests(target):
            if attribute in attributes or scheme.relation(target, attribute) == 0:
                record.log(CHALLENGER, "refuse-key", attribute)
                continue
            attributes.add(attribute)
            key, _, public = scheme.issue(challenger, attribute)
            record.log(CHALLENGER, "key", scheme.key_state(key))
            adversary.on_post_challenge_key(
                IssuedKey(len(issued), key, attribute, public)
            )

        guess = adversary.guess(ct)
        record.log(ADVERSARY, "guess", guess)
        record.verdict = Verdict.WIN if guess == coin else Verdict.LOSE

    return _play_all(
        game, scheme_name, params, trials, seed, threads, play, {"q": q}
    )


def run_ot_ind_kla(
    params: SchemeParams,
    adversary_factory: AdversaryFactory,
    q: int,
    trials: int,
    seed: int,
    *,
    threads: int = 1,
) -> GameReport:
    """SKE-CR-SKL: no encryption oracle, one challenge"""
    return run_kla(
        SchemeName.SKECRSKL,
        params,
        adversary_factory,
        q,
        trials,
        seed,
        game=GameName.OT_IND_KLA,
        threads=threads,
    )


def run_ind_kla(
    scheme_name: SchemeName,
    params: SchemeParams,
    adversary_factory: AdversaryFactory,
    q: int,
    trials: int,
    seed: int,
    *,
    threads: int = 1,
) -> GameReport:
    return run_kla(
        scheme_name,
        params,
        adversary_factory,
        q,
        trials,
        seed,
        game=GameName.IND_KLA,
        threads=threads,
    )


def run_key_test_experiment(
    params: SchemeParams,
    adversary_factory: AdversaryFactory,
    q: int,
    trials: int,
    seed: int,
    *,
    threads: int = 1,
) -> GameReport:
    """
    The adversary holds msk and q keys, then outputs (k, dk, m); it wins iff
    KeyTest(tk_k, dk) = 1 while CDec(dk, Enc(m)) ≠ m
    """

    def play(record: TrialRecord) -> None:
        challenger, adversary_rng = _streams(record)
        scheme = SkeCrSklScheme(params, challenger)
        adversary = adversary_factory(adversary_rng)
        adversary.bind(
            AdversaryView(
                scheme.message_width,
                scheme,
                extras={"msk": scheme.msk, "positions": params.n},
            )
        )
        issued = []
        for index in range(q):
            dk, vk, public = scheme.issue(challenger)
            issued.append(IssuedKey(index, dk, None, {**public, "vk": vk}))
            record.log(CHALLENGER, "key", dk.state)

        index, dk_bits, m = adversary.forge(issued)
        record.log(ADVERSARY, "forgery", (index, dk_bits, m))
        if not 0 <= index < q:
            record.verdict = Verdict.ABORT
            return
        raise_exception_if_width_differs(m, scheme.message_width, "message")
        ct = skecrskl.enc(scheme.msk, m)
        passed = skecrskl.keytest(issued[index].public["tk"], dk_bits) == 1
        correct = skecrskl.cdec(dk_bits, ct) == m
        record.checks["keytest"] = passed
        record.verdict = Verdict.WIN if passed and not correct else Verdict.LOSE

    return _play_all(
        GameName.KEY_TEST,
        SchemeName.SKECRSKL,
        params,
        trials,
        seed,
        threads,
        play,
        {"q": q},
    )


def run_ind_cva_cd(
    params: SchemeParams,
    adversary_factory: AdversaryFactory,
    trials: int,
    seed: int,
    *,
    alt_vk: bool = False,
    max_queries: Optional[int] = None,
    oracle: bool = True,
    threads: int = 1,
    game: GameName = GameName.IND_CVA_CD,
) -> GameReport:
    """
    Certified deletion experiment on SKECD

    The secret key is revealed after the first accepted certificate and the verdict
    is the guess only in that case. With ``alt_vk`` every later certificate is
    checked against (cert, θ) of the accepted one and ``alt_agree`` records whether
    that agreed with the real verification key.
    """

    def play(record: TrialRecord) -> None:
        challenger, adversary_rng = _streams(record)
        skecd_params = params.skecd()
        sk = skecd.kg(skecd_params, challenger)
        adversary = adversary_factory(adversary_rng)

        def encrypt(m: Bits, target=None):
            ct, _ = skecd.enc(sk, m, challenger)
            record.log(CHALLENGER, "encrypt", ct.classical_part)
            return ct

        view = AdversaryView(skecd_params.msg_width, None, encrypt if oracle else None)
        adversary.bind(view)

        m0, m1 = _challenge_pair(adversary, skecd_params.msg_width)
        coin = random_bit(challenger)
        ct, vk = skecd.enc(sk, m1 if coin else m0, challenger)
        record.log(CHALLENGER, "challenge", ct.quantum)

        certificates = adversary.on_challenge_ciphertext(ct)
        if max_queries is not None:
            certificates = certificates[:max_queries]
        current = vk
        accepted = False
        agree = True
        for index, cert in enumerate(certificates):
            ok = skecd.vrfy(current, cert)
            agree = agree and ok == skecd.vrfy(vk, cert)
            record.log(CHALLENGER, "verify", (cert.bits, ok))
            adversary.on_verify_result(index, ok)
            if ok and not accepted:
                accepted = True
                if alt_vk:
                    current = skecd.alt_vk(vk.theta, cert)
        record.flags = [accepted]
        record.checks["verified"] = accepted
        if alt_vk:
            record.checks["alt_agree"] = agree
        if not accepted:
            record.verdict = Verdict.ABORT
            return
        adversary.on_secret_key(sk)
        guess = adversary.guess(ct)
        record.log(ADVERSARY, "guess", guess)
        record.verdict = Verdict.WIN if guess == coin else Verdict.LOSE

    return _play_all(game, SchemeName.SKECD, params, trials, seed, threads, play)


def run_ind_cd(
    params: SchemeParams,
    adversary_factory: AdversaryFactory,
    trials: int,
    seed: int,
    *,
    threads: int = 1,
) -> GameReport:
    """One challenge, no encryption oracle, exactly one verification query"""
    return run_ind_cva_cd(
        params,
        adversary_factory,
        trials,
        seed,
        max_queries=1,
        oracle=False,
        threads=threads,
        game=GameName.IND_CD,
    )


def collusion_demo(
    scheme_name: SchemeName,
    params: SchemeParams,
    q: int,
    trials: int,
    seed: int,
    *,
    threads: int = 1,
) -> GameReport:
    """The measure-and-copy attacker against any leasing scheme"""
    return run_kla(
        scheme_name,
        params,
        ADVERSARIES[AdversaryName.COLLUDER],
        q,
        trials,
        seed,
        game=GameName.COLLUSION_DEMO,
        threads=threads,
    )


def strawman_collusion_demo(
    q: int, trials: int, seed: int, params: Optional[SchemeParams] = None
) -> GameReport:
    """
    Verification passes with probability 1 - 2^(1-q): the attacker needs to see
    both branches among its q measurements
    """
    params = params or SchemeParams()
    return collusion_demo(SchemeName.STRAWMAN, params, q, trials, seed)


def run_roundtrip(
    scheme_name: SchemeName,
    params: SchemeParams,
    trials: int,
    seed: int,
    *,
    threads: int = 1,
) -> GameReport:
    """Honest correctness trials; a trial wins when every check passed"""

    def play(record: TrialRecord) -> None:
        rng, _ = _streams(record)
        if scheme_name is SchemeName.SKECD:
            checks = skecd_roundtrip(params, rng)
        else:
            checks = make_scheme(scheme_name, params, rng).roundtrip(rng)
        record.checks = checks
        record.log(CHALLENGER, "roundtrip", checks)
        record.verdict = Verdict.WIN if all(checks.values()) else Verdict.LOSE

    return _play_all(
        GameName.ROUNDTRIP, scheme_name, params, trials, seed, threads, play
    )


def run_game(config: RunConfig) -> GameReport:
    """Dispatch a validated run configuration"""
    config.validate()
    params = config.scheme_params()
    factory = adversary_factory(config.effective_adversary)
    common = dict(threads=config.threads)
    game = config.game
    if game is GameName.ROUNDTRIP:
        return run_roundtrip(
            config.scheme, params, config.trials, config.seed, **common
        )
    if game is GameName.OT_IND_KLA:
        return run_ot_ind_kla(
            params, factory, config.keys, config.trials, config.seed, **common
        )
    if game is GameName.IND_KLA:
        return run_ind_kla(
            config.scheme,
            params,
            factory,
            config.keys,
            config.trials,
            config.seed,
            **common,
        )
    if game is GameName.KEY_TEST:
        return run_key_test_experiment(
            params, factory, config.keys, config.trials, config.seed, **common
        )
    if game is GameName.IND_CVA_CD:
        return run_ind_cva_cd(params, factory, config.trials, config.seed, **common)
    if game is GameName.IND_CD:
        return run_ind_cd(params, factory, config.trials, config.seed, **common)
    if game is GameName.COLLUSION_DEMO:
        return collusion_demo(
            config.scheme, params, config.keys, config.trials, config.seed, **common
        )
    raise GameError(f"Unknown game '{game}'")
