from rgather.cli import main

main()
