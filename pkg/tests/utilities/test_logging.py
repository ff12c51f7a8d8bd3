import logging

from eigenstrata.utilities.logging import get_logger, setup_logging


class TestGetLogger:
    def test_package_logger(self):
        assert get_logger().name == "eigenstrata"

    def test_children_are_nested_once(self):
        assert get_logger("specfn").name == "eigenstrata.specfn"
        assert get_logger("eigenstrata.specfn") is get_logger("specfn")

    def test_setup_logging(self):
        setup_logging("ERROR")
        assert get_logger().level == logging.ERROR
        setup_logging()
        assert get_logger().level == logging.DEBUG
