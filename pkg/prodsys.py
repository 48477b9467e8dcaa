"""Run the prodsys command-line interface."""
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

from src.main import app

if __name__ == '__main__':
    app()
