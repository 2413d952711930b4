import logging

import pytest

from oqrw.exceptions import (
    FileFormatError,
    InvalidParameterError,
    KindError,
    NormalizationError,
    PreconditionError,
    StructuralError,
)
from oqrw.utils.exceptions import error_exit_code, make_error_response


@pytest.fixture
def quiet():
    logger = logging.getLogger("oqrw")
    previous = logger.level
    logger.setLevel(logging.WARNING)
    yield logger
    logger.setLevel(previous)


class TestErrorResponse:
    """Error records written by the command line on failure."""

    def test_exit_codes_follow_the_exception(self):
        assert error_exit_code(KindError("forward only")) == 1
        assert error_exit_code(InvalidParameterError("p")) == 2
        assert error_exit_code(FileFormatError("bad")) == 2
        assert error_exit_code(PreconditionError("never charged")) == 4
        assert error_exit_code(FileNotFoundError("walk.json")) == 2
        assert error_exit_code(RuntimeError("boom")) == 1

    def test_file_location(self, quiet):
        response = make_error_response(FileFormatError("expected [re, im]", location="transitions[1].matrix[0][0]"))

        assert response == {
            "status": False,
            "message": "transitions[1].matrix[0][0]: expected [re, im]",
            "exception": "FileFormatError",
            "exit_code": 2,
            "location": "transitions[1].matrix[0][0]",
        }

    def test_structural_pair_and_residuals(self, quiet):
        structural = make_error_response(StructuralError("block is not 2×2", pair=(1, 0)))
        normalization = make_error_response(NormalizationError("Kraus condition", residuals={1: 0.5, 0: 0.25}))

        assert structural["pair"] == [1, 0]
        assert normalization["residuals"] == {"0": 0.25, "1": 0.5}
        assert normalization["exit_code"] == 1

    def test_message_override(self, quiet):
        response = make_error_response(ValueError("raw"), message="config.yaml: not a mapping")

        assert response["message"] == "config.yaml: not a mapping"
        assert response["exit_code"] == 2
        assert "location" not in response

    def test_traceback_only_when_debugging(self, quiet):
        try:
            raise PreconditionError("φ(J₀(e)) = 0")
        except PreconditionError as e:
            assert "traceback" not in make_error_response(e)
            quiet.setLevel(logging.DEBUG)
            traceback = make_error_response(e)["traceback"]

        assert traceback[-1].startswith("oqrw.exceptions.PreconditionError")
