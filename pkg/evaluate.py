from gravrec.script import evaluate

if __name__ == "__main__":
    evaluate.main()
