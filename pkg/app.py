import logging
import sys
from pathlib import Path

import click
from dotenv import load_dotenv

# Set up base directory and sys.path
BASE_DIR = Path(__file__).resolve().parent
sys.path.append(str(BASE_DIR))  # Allow imports from project root

from tube_hardy.cone_quadrature import set_limits
from tube_hardy.config import Settings
from tube_hardy.errors import ConfigInvalid
from utils import render_json

LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'


def create_app(env_file: Path = BASE_DIR / '.env') -> click.Group:
    # Load environment variables
    load_dotenv(dotenv_path=env_file)

    try:
        settings = Settings.from_env()
    except ConfigInvalid as e:
        click.echo(render_json(e.to_dict(), strict=False), nl=False)
        sys.exit(e.exit_code)

    logging.basicConfig(level=settings.log_level, format=LOG_FORMAT, stream=sys.stderr)
    set_limits(settings.limits())

    @click.group()
    def app():
        """Numerics for Hardy-Sobolev spaces on tube domains."""

    # Import commands after settings are applied
    from commands.carleson import carleson_command
    from commands.decompose import decompose_command
    from commands.kernel import kernel_command
    from commands.norms import norms_command
    from commands.operators import operators_command
    from commands.verify import verify_command

    app.add_command(kernel_command)
    app.add_command(decompose_command)
    app.add_command(norms_command)
    app.add_command(carleson_command)
    app.add_command(operators_command)
    app.add_command(verify_command)
    return app


if __name__ == "__main__":
    create_app()()
