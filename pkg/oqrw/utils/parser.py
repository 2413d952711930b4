import argparse

from oqrw import __version__
from oqrw.evolution import InvariantMethod
from oqrw.recurrence import AccessMode, Criterion
from oqrw.scenarios import PART2_CASES


class OQRWArgParser(argparse.ArgumentParser):
    def __init__(self, description=None):
        super().__init__(prog="oqrw", description=description)
        self.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

        self.common = argparse.ArgumentParser(add_help=False)
        self.add_common_arguments(self.common)

        self.commands = self.add_subparsers(
            dest="command", metavar="COMMAND", required=True, parser_class=argparse.ArgumentParser
        )
        self.add_validate_command()
        self.add_evolve_commands()
        self.add_invariant_command()
        self.add_qmc_command()
        self.add_recurrence_commands()
        self.add_example_command()

    @staticmethod
    def add_common_arguments(parser):
        # Defaults stay None so that config file values can fill them in.
        parser.add_argument(
            "--tol",
            type=float,
            dest="kraus_tol",
            help="Tolerance of the Kraus condition. Default: 1e-9.",
        )
        parser.add_argument(
            "--trace-tol",
            type=float,
            dest="trace_tol",
            help="Tolerance on the total trace of input states. Default: 1e-9.",
        )
        parser.add_argument(
            "--decision-tol",
            type=float,
            dest="decision_tol",
            help="Distance to the target below which a criterion holds. Default: 1e-8.",
        )
        parser.add_argument(
            "--access-tol",
            type=float,
            dest="access_tol",
            help="Values above this count as non-vanishing. Default: 1e-12.",
        )
        parser.add_argument(
            "--format",
            choices=["csv", "json"],
            dest="fmt",
            help="Output format. Default: csv.",
        )
        parser.add_argument(
            "--threads",
            type=int,
            help="Threads used to evaluate site blocks. Default: 1.",
        )
        parser.add_argument(
            "--config",
            help="YAML file with a 'defaults' section.",
        )
        parser.add_argument(
            "--out",
            help="Output file. Default: stdout.",
        )

    def add_command(self, name, help):
        return self.commands.add_parser(name, help=help, parents=[self.common])

    @staticmethod
    def add_kind_argument(parser):
        parser.add_argument(
            "--kind",
            choices=["forward", "dual"],
            help="Transition expectation of the Markov pair. Default: forward.",
        )

    def add_validate_command(self):
        parser = self.add_command("validate", "Check the Kraus condition of a walk file.")
        parser.add_argument("walk", help="Walk file (JSON or YAML).")

    def add_evolve_commands(self):
        for name, help in (
            ("evolve", "Position distribution after every step."),
            ("dist", "Position distribution after the last step."),
        ):
            parser = self.add_command(name, help)
            parser.add_argument("walk", help="Walk file.")
            parser.add_argument("state", help="Initial state file.")
            parser.add_argument(
                "--steps",
                "-n",
                type=int,
                dest="n",
                required=True,
                help="Number of steps.",
            )

    def add_invariant_command(self):
        parser = self.add_command("invariant", "Search an invariant state of a strict walk.")
        parser.add_argument("walk", help="Walk file.")
        parser.add_argument(
            "--method",
            choices=[m.value for m in InvariantMethod],
            default=InvariantMethod.DENSE_EIGEN.value,
            help="Search method. Default: dense_eigen.",
        )
        parser.add_argument(
            "--max-iters",
            type=int,
            dest="max_iters",
            default=100_000,
            help="Iteration cap of the power iteration. Default: 100000.",
        )

    def add_qmc_command(self):
        parser = self.add_command("qmc-eval", "Evaluate the chain on a word of observables.")
        parser.add_argument("walk", help="Walk file.")
        parser.add_argument("state", help="State file.")
        parser.add_argument("observables", nargs="+", help="Observable files x0 x1 ... xn.")
        self.add_kind_argument(parser)
        parser.add_argument(
            "--method",
            choices=["product", "nested"],
            default="product",
            help="Evaluation route. Default: product.",
        )

    def add_recurrence_commands(self):
        parser = self.add_command("recurrence", "Certify a recurrence or accessibility criterion.")
        parser.add_argument("walk", help="Walk file.")
        parser.add_argument("state", help="State file.")
        parser.add_argument("proj", help="Projection file.")
        parser.add_argument(
            "--criterion",
            choices=[c.value for c in Criterion],
            required=True,
            help="Criterion to certify.",
        )
        self.add_kind_argument(parser)
        parser.add_argument(
            "--n-max",
            type=int,
            dest="n_max",
            help="Largest horizon. Default: 200.",
        )
        parser.add_argument(
            "--series-out",
            dest="series_out",
            help="Also write the horizon series as CSV to this file.",
        )

        parser = self.add_command("accessible", "Decide whether projection F is accessible from E.")
        parser.add_argument("walk", help="Walk file.")
        parser.add_argument("state", help="State file.")
        parser.add_argument("proj", help="Projection file of e.")
        parser.add_argument("proj2", help="Projection file of f.")
        self.add_kind_argument(parser)
        parser.add_argument(
            "--mode",
            choices=[m.value for m in AccessMode],
            default=AccessMode.PHI.value,
            help="Accessibility through the state or the conditional expectation. Default: phi.",
        )
        parser.add_argument(
            "--n-max",
            type=int,
            dest="n_max",
            help="Largest horizon. Default: 200.",
        )
        parser.add_argument(
            "--both",
            action="store_true",
            default=False,
            help="Require accessibility in both directions.",
        )

    def add_example_command(self):
        parser = self.add_command("example", "Write walk, state and projection files of a worked example.")
        parser.add_argument("name", choices=["ring", "two-site", "two-site-part2"])
        parser.add_argument(
            "--out-dir",
            dest="out_dir",
            default=".",
            help="Directory receiving walk.json, state.json and projection.json. Default: current directory.",
        )
        parser.add_argument("--n", type=int, dest="ex_n", help="Ring size. Default: 11.")
        parser.add_argument("--pr", type=float, dest="ex_pr", help="Ring coin weight. Default: 0.3.")
        parser.add_argument("--site", type=int, dest="ex_site", help="Site of the ring projection. Default: 0.")
        parser.add_argument(
            "--condition-a",
            action="store_true",
            dest="ex_condition_a",
            default=None,
            help="Ring variant with B = diag(sqrt(pr), 0) and C = diag(sqrt(1-pr), 1).",
        )
        parser.add_argument("--a", type=float, dest="ex_a", help="Two-site parameter a.")
        parser.add_argument("--b", type=float, dest="ex_b", help="Two-site parameter b.")
        parser.add_argument("--c", type=float, dest="ex_c", help="Two-site parameter c.")
        parser.add_argument("--d", type=float, dest="ex_d", help="Two-site parameter d.")
        parser.add_argument("--p", type=float, dest="ex_p", help="Two-site parameter p in (0, 1).")
        parser.add_argument(
            "--overlap",
            type=float,
            dest="ex_overlap",
            help="<e1|P|e1> of the site-2 projection (two-site). Default: 0.5.",
        )
        parser.add_argument("--t", type=float, dest="ex_t", help="Tr(rho0 P) (two-site-part2). Default: 0.5.")
        parser.add_argument(
            "--case",
            choices=list(PART2_CASES),
            dest="ex_case",
            help="Which of P(x)|1><1| is the projection or its complement (two-site-part2).",
        )
