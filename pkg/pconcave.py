import logging
import sys

from pconcave_app.cli import main as cli_main
from pconcave_app.config import AppConfig, configure_logging, load_env_from_file
from pconcave_app.metrics import create_influx_client


def main() -> int:
    load_env_from_file()
    configure_logging()
    config = AppConfig.from_env()
    client = create_influx_client(config) if config.enable_influx else None

    logging.info("Starting p-concavity verifier")
    try:
        return cli_main(sys.argv[1:], config, client)
    finally:
        if client is not None:
            client.close()


if __name__ == "__main__":
    sys.exit(main())
